//! Prints one PASS or FAIL line per acceptance criterion.

mod support;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use geoconc::corpus::{self, CorpusEntry};
use geoconc_core::equivalence::{crosscheck_logic, crosscheck_st, EquivOptions};
use geoconc_core::hda::{is_acyclic, is_cubical, make_hypercube, validate};
use geoconc_core::paths::{adjacency_candidates, enumerate_rooted_paths, l_adjacent};
use geoconc_core::st::{from_hda, ConfigurationStructure};
use geoconc_core::{hh_bisim_hda, parse, sat_hda, Hda, StStructure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criteria whose expected verdicts cannot hold as stated; see the README.
const KNOWN_FAILURES: &[usize] = &[6];

struct Check {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Result<String, String>,
}

fn init(h: &Hda) -> geoconc_core::CellId {
    h.initial()[0]
}

/// The formula holds in the first model, fails in the second, and the
/// models are not hh-bisimilar.
fn separates(name: &str) -> Result<String, String> {
    let e: CorpusEntry = corpus::entry(name).ok_or("missing entry")?;
    let phi = parse(e.formula).map_err(|x| x.to_string())?;
    let on_first = sat_hda(&e.first, init(&e.first), &phi).map_err(|x| x.to_string())?;
    let on_second = sat_hda(&e.second, init(&e.second), &phi).map_err(|x| x.to_string())?;
    let verdict = hh_bisim_hda(&e.first, init(&e.first), &e.second, init(&e.second), &EquivOptions::default())
        .map_err(|x| x.to_string())?;
    let detail = format!("{} on E {on_first}, on F {on_second}; hh-equivalent {}", e.formula, verdict.is_equivalent());
    if on_first && !on_second && !verdict.is_equivalent() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn st_agreement() -> Result<String, String> {
    let mut pairs: Vec<(Hda, Hda)> = corpus::entries().into_iter().map(|e| (e.first, e.second)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let cube = make_hypercube(&support_labels(&mut rng)).map_err(|x| x.to_string())?;
        pairs.push((support::carve_randomly(&cube, &mut rng), support::carve_randomly(&cube, &mut rng)));
    }
    let mut equivalent = 0;
    for (k, (a, b)) in pairs.iter().enumerate() {
        let x = crosscheck_st(a, b, &EquivOptions::default()).map_err(|x| format!("pair {k}: {x}"))?;
        if !x.agree() {
            return Err(format!(
                "pair {k}: automata {} but ST-structures {}",
                x.hda.is_equivalent(),
                x.st.is_equivalent()
            ));
        }
        if !x.translations_qualify {
            return Err(format!("pair {k}: a translation is not rooted, connected and adjacent-closed"));
        }
        equivalent += usize::from(x.hda.is_equivalent());
    }
    Ok(format!("{} pairs agree ({equivalent} equivalent)", pairs.len()))
}

fn support_labels(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| *["a", "b"].choose(rng).expect("labels")).collect()
}

fn logic_agreement() -> Result<String, String> {
    let mut formulas = Vec::new();
    for e in corpus::entries() {
        let depth = e.first.len() + e.second.len();
        let x = crosscheck_logic(&e.first, init(&e.first), &e.second, init(&e.second), depth, &EquivOptions::default())
            .map_err(|x| format!("{}: {x}", e.name))?;
        if !x.agree() {
            return Err(format!("{}: hh {} but modal {}", e.name, x.hda.is_equivalent(), x.modal.equivalent));
        }
        if let Some(f) = &x.modal.distinguishing {
            if x.formula_confirmed != Some(true) {
                return Err(format!("{}: {f} is not confirmed", e.name));
            }
            formulas.push(format!("{} {f}", e.name));
        }
    }
    Ok(formulas.join("; "))
}

fn adjacent_closure() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sizes = 0;
    for k in 0..500 {
        let st = support::random_st(&mut rng, 4);
        let p = st.properties();
        if !(p.rooted && p.connected && p.single_event_closed) {
            return Err(format!("generator produced an unqualified structure #{k}"));
        }
        if !p.adjacent_closed {
            return Err(format!("structure #{k} is not adjacent-closed: {:?}", st.configs()));
        }
        sizes += st.configs().len();
    }
    Ok(format!("500 structures, {sizes} configurations, 0 counterexamples"))
}

fn cubes_are_lawful() -> Result<usize, String> {
    let mut count = 0;
    for n in 1..=4u32 {
        for bits in 0..1u32 << n {
            let labels: Vec<&str> = (0..n).map(|i| if bits >> i & 1 == 1 { "b" } else { "a" }).collect();
            let cube = make_hypercube(&labels).map_err(|x| x.to_string())?;
            let report = validate(&cube);
            if !report.is_clean() || !is_acyclic(&cube) || is_cubical(&cube) != Ok(true) {
                return Err(format!("cube {labels:?}: {:?}", report.violations));
            }
            count += 1;
        }
    }
    Ok(count)
}

fn adjacency_is_unique() -> Result<(usize, usize), String> {
    let (mut paths, mut positions) = (0, 0);
    let mut models: Vec<Hda> = corpus::entries().into_iter().flat_map(|e| [e.first, e.second]).collect();
    models.push(corpus::filled_square());
    models.push(corpus::parallel_switch());
    for h in &models {
        for p in enumerate_rooted_paths(h, None).map_err(|x| x.to_string())? {
            paths += 1;
            for l in 1..p.len() {
                positions += 1;
                let candidates = adjacency_candidates(h, &p, l).map_err(|x| x.to_string())?;
                if candidates.len() > 1 {
                    return Err(format!("{} has {} {l}-adjacent paths", p.encode(h), candidates.len()));
                }
                if let Some(q) = l_adjacent(h, &p, l).map_err(|x| x.to_string())? {
                    if l_adjacent(h, &q, l).map_err(|x| x.to_string())? != Some(p.clone()) {
                        return Err(format!("swapping {} at {l} twice does not return", p.encode(h)));
                    }
                }
            }
        }
    }
    Ok((paths, positions))
}

fn configurations_behave(st: &StStructure) -> Result<(), String> {
    let (p, c) = (st.properties(), st.to_configuration_structure().properties());
    let kept = [
        ("rooted", p.rooted, c.rooted),
        ("connected", p.connected, c.connected),
        ("union closed", p.union_closed, c.union_closed),
        ("intersection closed", p.intersection_closed, c.intersection_closed),
        ("stable", p.stable, c.stable),
    ];
    match kept.iter().find(|(_, st_has, cfg_has)| *st_has && !cfg_has) {
        Some((name, ..)) => Err(format!("{name} is lost in {:?}", st.configs())),
        None => Ok(()),
    }
}

fn structural() -> Result<String, String> {
    let cubes = cubes_are_lawful()?;
    let (paths, positions) = adjacency_is_unique()?;

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut structures: Vec<StStructure> = Vec::new();
    for e in corpus::entries() {
        for h in [&e.first, &e.second] {
            structures.push(from_hda(h).map_err(|x| x.to_string())?.st);
        }
    }
    structures.extend((0..200).map(|_| support::random_st(&mut rng, 4)));
    let stable: Vec<ConfigurationStructure> = (0..200).map(|_| support::random_stable_cfg(&mut rng, 5)).collect();
    if corpus::parallel_switch_st().to_configuration_structure().properties().stable {
        return Err("the parallel switch has a stable configuration structure".into());
    }
    for cfg in &stable {
        if !cfg.properties().stable {
            return Err(format!("generator produced an unstable family {:?}", cfg.configs()));
        }
        let st = cfg.to_st_structure().map_err(|x| x.to_string())?;
        if st.to_configuration_structure() != *cfg {
            return Err(format!("round trip changes {:?}", cfg.configs()));
        }
        structures.push(st);
    }
    for st in &structures {
        configurations_behave(st)?;
    }

    let corpus_two = corpus::entry("fig2").ok_or("missing fig2")?;
    let filled = from_hda(&corpus_two.first).map_err(|x| x.to_string())?.st;
    let hollow = from_hda(&corpus_two.second).map_err(|x| x.to_string())?.st;
    if filled == hollow || filled.to_configuration_structure() != hollow.to_configuration_structure() {
        return Err("the filled and hollow squares are not a non-injectivity witness".into());
    }
    Ok(format!(
        "{cubes} cubes lawful; {paths} paths, {positions} positions unique and involutive; \
         {} structures keep their properties; {} stable round trips; filled and hollow share a configuration structure",
        structures.len(),
        stable.len()
    ))
}

const CHECKS: &[Check] = &[
    Check {
        id: 1,
        name: "concurrent square against interleaving",
        limit: Duration::from_secs(1),
        run: || separates("fig2"),
    },
    Check { id: 2, name: "four-cube against its boundary", limit: Duration::from_secs(1), run: || separates("fig3") },
    Check { id: 3, name: "termination order after a choice", limit: Duration::from_secs(1), run: || separates("fig4") },
    Check { id: 4, name: "shared third event", limit: Duration::from_secs(5), run: || separates("fig5") },
    Check { id: 5, name: "continuations after a square", limit: Duration::from_secs(5), run: || separates("fig6") },
    Check { id: 6, name: "hollow cube against full cube", limit: Duration::from_secs(30), run: || separates("fig7") },
    Check { id: 7, name: "automata and ST-structures agree", limit: Duration::from_secs(120), run: st_agreement },
    Check {
        id: 8,
        name: "hh-bisimilarity matches modal equivalence",
        limit: Duration::from_secs(300),
        run: logic_agreement,
    },
    Check {
        id: 9,
        name: "single-event closure implies adjacent closure",
        limit: Duration::from_secs(60),
        run: adjacent_closure,
    },
    Check { id: 10, name: "structural suites", limit: Duration::from_secs(600), run: structural },
];

fn main() {
    let mut failed = BTreeSet::new();
    for check in CHECKS {
        let clock = Instant::now();
        let result = (check.run)();
        let elapsed = clock.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= check.limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow, limit {:?}", check.limit)),
            Err(d) => (false, d),
        };
        if !ok {
            failed.insert(check.id);
        }
        println!(
            "criterion {:>2} {}: {} ({elapsed:.2?}) {detail}",
            check.id,
            if ok { "PASS" } else { "FAIL" },
            check.name
        );
    }
    let expected: BTreeSet<usize> = KNOWN_FAILURES.iter().copied().collect();
    if failed != expected {
        eprintln!("failing criteria {failed:?}, expected {expected:?}");
        std::process::exit(1);
    }
}

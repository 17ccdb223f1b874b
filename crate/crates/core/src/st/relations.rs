//! Concurrency, causality and conflict between events.
//!
//! The first two are relative to a configuration `(S, T)` and range over
//! the members `(S', T')` of the structure with `S' ⊆ S` and `T' ⊆ T`.

use super::{EventSet, StConfig, StError, StStructure};

fn below(st: &StStructure, c: StConfig) -> impl Iterator<Item = StConfig> + '_ {
    st.configs().iter().copied().filter(move |d| d.is_within(c))
}

fn check_started(st: &StStructure, c: StConfig, e: usize) -> Result<(), StError> {
    if e >= st.events().len() {
        return Err(StError::UnknownEvent(alloc::format!("#{e}")));
    }
    if !c.s.contains(e) {
        return Err(StError::EventNotInConfiguration(st.events()[e].name.clone()));
    }
    Ok(())
}

/// `e ∥ e'` at `c`: some configuration below `c` executes both at once.
pub fn concurrency(st: &StStructure, c: StConfig, e: usize, f: usize) -> Result<bool, StError> {
    check_started(st, c, e)?;
    check_started(st, c, f)?;
    if e == f {
        return Ok(false);
    }
    let pair = EventSet::singleton(e).with(f);
    Ok(below(st, c).any(|d| pair.is_subset(d.executing())))
}

/// `e < e'` at `c`: every configuration below `c` that has started `e'`
/// has terminated `e`.
pub fn causality(st: &StStructure, c: StConfig, e: usize, f: usize) -> Result<bool, StError> {
    check_started(st, c, e)?;
    check_started(st, c, f)?;
    if e == f {
        return Err(StError::EqualEvents);
    }
    Ok(below(st, c).all(|d| !d.s.contains(f) || d.t.contains(e)))
}

/// `#E`: no configuration of the structure starts all of `events`.
pub fn conflict(st: &StStructure, events: EventSet) -> Result<bool, StError> {
    if events.is_empty() {
        return Err(StError::EmptyEventSet);
    }
    if let Some(e) = events.difference(st.all_events()).iter().next() {
        return Err(StError::UnknownEvent(alloc::format!("#{e}")));
    }
    Ok(!st.configs().iter().any(|c| events.is_subset(c.s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::st::fixtures::*;

    fn full(st: &StStructure) -> StConfig {
        StConfig::new(st.all_events(), st.all_events())
    }

    #[test]
    fn concurrency_in_the_squares() {
        let sq = filled_square_st();
        assert_eq!(concurrency(&sq, full(&sq), 0, 1), Ok(true));
        assert_eq!(concurrency(&sq, full(&sq), 0, 0), Ok(false));
        let h = hollow_square_st();
        assert_eq!(concurrency(&h, full(&h), 0, 1), Ok(false));
        let only_a = StConfig::new(EventSet::singleton(0), EventSet::singleton(0));
        assert!(matches!(concurrency(&sq, only_a, 0, 1), Err(StError::EventNotInConfiguration(_))));
    }

    #[test]
    fn causality_in_sequence_and_square() {
        let seq = sequence_st();
        assert_eq!(causality(&seq, full(&seq), 0, 1), Ok(true));
        assert_eq!(causality(&seq, full(&seq), 1, 0), Ok(false));
        let sq = filled_square_st();
        assert_eq!(causality(&sq, full(&sq), 0, 1), Ok(false));
        assert_eq!(causality(&sq, full(&sq), 0, 0), Err(StError::EqualEvents));
    }

    #[test]
    fn concurrency_and_causality_are_disjoint() {
        for st in [filled_square_st(), hollow_square_st(), sequence_st(), choice_st()] {
            for &c in st.configs() {
                for e in c.s.iter() {
                    for f in c.s.iter().filter(|&f| f != e) {
                        assert!(!(concurrency(&st, c, e, f).unwrap() && causality(&st, c, e, f).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn conflict() {
        let both = EventSet::singleton(0).with(1);
        assert_eq!(super::conflict(&hollow_square_st(), both), Ok(false));
        assert_eq!(super::conflict(&choice_st(), both), Ok(true));
        assert_eq!(super::conflict(&choice_st(), EventSet::singleton(0)), Ok(false));
        assert_eq!(super::conflict(&choice_st(), EventSet::empty()), Err(StError::EmptyEventSet));
        assert!(super::conflict(&choice_st(), EventSet::singleton(9)).is_err());
    }
}

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Formula, LabelSel, LogicError, Modality};

/// Parses the ASCII syntax:
///
/// ```text
/// φ ::= true | false | ident | (φ) | !φ | φ & φ | φ | φ | φ -> φ
///     | {a}φ | <a>φ | back{a}φ | back<a>φ
///     | [[a]]φ | [a]φ | back[[a]]φ | back[a]φ | <<a,b,...>>φ
/// ```
///
/// Modalities and `!` bind tightest, then `&`, `|` and the right
/// associative `->`. A label `_` stands for any label.
pub fn parse(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let f = p.implication()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected input after the formula"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

impl Parser<'_> {
    fn error(&self, message: &str) -> LogicError {
        LogicError::Parse { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &[u8] {
        &self.src[self.pos..]
    }

    /// Consumes `token` if the input continues with it, after whitespace.
    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), LogicError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.src.get(self.pos).copied().is_some_and(is_ident_start) {
            return None;
        }
        while self.src.get(self.pos).copied().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn label(&mut self) -> Result<LabelSel, LogicError> {
        let name = self.ident().ok_or_else(|| self.error("expected a label"))?;
        Ok(LabelSel::from(name.as_str()))
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let left = self.disjunction()?;
        if self.eat("->") {
            let right = self.implication()?;
            return Ok(left.implies(right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn modality(&mut self) -> Result<Option<(Modality, bool, LabelSel)>, LogicError> {
        self.skip_ws();
        let back = self.rest().starts_with(b"back") && matches!(self.src.get(self.pos + 4), Some(b'{' | b'<' | b'['));
        if back {
            self.pos += 4;
        }
        let (forward, backward, boxed, close) = if self.eat_raw("[[") {
            (Modality::During, Modality::BackDuring, true, "]]")
        } else if self.eat_raw("[") {
            (Modality::After, Modality::BackAfter, true, "]")
        } else if self.eat_raw("{") {
            (Modality::During, Modality::BackDuring, false, "}")
        } else if self.eat_raw("<") {
            (Modality::After, Modality::BackAfter, false, ">")
        } else if back {
            return Err(self.error("expected a modality after `back`"));
        } else {
            return Ok(None);
        };
        let label = self.label()?;
        self.expect(close)?;
        Ok(Some((if back { backward } else { forward }, boxed, label)))
    }

    fn eat_raw(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        if self.eat("!") {
            return Ok(self.unary()?.not());
        }
        self.skip_ws();
        if self.rest().starts_with(b"<<") {
            self.pos += 2;
            let mut labels = Vec::new();
            loop {
                let name = self.ident().ok_or_else(|| self.error("expected a label"))?;
                labels.push(name);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(">>")?;
            return Ok(Formula::Step(labels, Box::new(self.unary()?)));
        }
        if let Some((m, boxed, label)) = self.modality()? {
            let inner = Box::new(self.unary()?);
            return Ok(if boxed { Formula::Boxed(m, label, inner) } else { Formula::Diamond(m, label, inner) });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, LogicError> {
        if self.eat("(") {
            let f = self.implication()?;
            self.expect(")")?;
            return Ok(f);
        }
        let start = self.pos;
        match self.ident().as_deref() {
            Some("true") => Ok(Formula::True),
            Some("false") => Ok(Formula::False),
            Some("_") => {
                self.pos = start;
                Err(self.error("`_` is a wildcard label, not a proposition"))
            }
            Some(name) => Ok(Formula::atom(name)),
            None if self.pos >= self.src.len() => Err(self.error("unexpected end of formula")),
            None => Err(self.error("expected a formula")),
        }
    }
}

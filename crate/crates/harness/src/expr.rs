//! Arithmetic on numeric settings, so resolutions can be written as `pi/16` or `0.05/2^3`.

use crate::error::{HarnessError, Result};

/// Evaluates `+ - * / ^`, parentheses, decimal literals and the constant `pi`.
pub fn eval(src: &str) -> Result<f64> {
    let mut p = Parser {
        s: src.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.fail("unexpected trailing input"));
    }
    if !v.is_finite() {
        return Err(HarnessError::Config(format!("'{src}' does not evaluate to a finite number")));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, msg: &str) -> HarnessError {
        HarnessError::Config(format!(
            "cannot parse '{}' at offset {}: {msg}",
            String::from_utf8_lossy(self.s),
            self.pos
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == b'+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.power()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.power()?;
            v = if op == b'*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn power(&mut self) -> Result<f64> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.power()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.fail("missing ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                match &self.s[start..self.pos] {
                    b"pi" | b"PI" => Ok(std::f64::consts::PI),
                    _ => {
                        self.pos = start;
                        Err(self.fail("unknown identifier"))
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() {
                    let c = self.s[self.pos];
                    let exp_sign = (c == b'+' || c == b'-')
                        && self.pos > start
                        && matches!(self.s[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                text.parse::<f64>().map_err(|_| {
                    self.pos = start;
                    self.fail("malformed number")
                })
            }
            _ => Err(self.fail("expected a number")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::eval;
    use std::f64::consts::PI;

    #[test]
    fn evaluates_expressions() {
        assert_eq!(eval("pi/16").unwrap(), PI / 16.0);
        assert_eq!(eval("0.05/2^3").unwrap(), 0.05 / 8.0);
        assert_eq!(eval("2^-4").unwrap(), 0.0625);
        assert_eq!(eval("1e-4").unwrap(), 1e-4);
        assert_eq!(eval("2.5E+2").unwrap(), 250.0);
        assert_eq!(eval(" 2 * (1 + 3) ").unwrap(), 8.0);
        assert_eq!(eval("-3 + 1").unwrap(), -2.0);
        assert_eq!(eval("2^3^2").unwrap(), 512.0);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pi/", "foo", "1..2", "(1", "1/0", "3 4"] {
            assert!(eval(bad).is_err(), "{bad}");
        }
    }

    proptest::proptest! {
        #[test]
        fn literals_round_trip(x in -1e12..1e12f64) {
            proptest::prop_assert_eq!(eval(&format!("{x:e}")).unwrap(), x);
            proptest::prop_assert_eq!(eval(&format!("({x:?})*2")).unwrap(), x * 2.0);
        }
    }
}

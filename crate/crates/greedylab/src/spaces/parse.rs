//! Recursive-descent parser for the space-spec grammar.

use super::SpaceSpec;
use crate::core::WeightSpec;
use crate::error::{Error, Result};

pub(super) struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected '{token}'"))
        }
    }

    pub(super) fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.err(format!("unexpected trailing input '{}'", self.rest()))
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        if self.eat("inf") {
            return Ok(f64::INFINITY);
        }
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        while len < bytes.len() {
            let c = bytes[len];
            let sign_ok = (c == b'-' || c == b'+') && (len == 0 || matches!(bytes[len - 1], b'e' | b'E'));
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || sign_ok {
                len += 1;
            } else {
                break;
            }
        }
        if len == 0 {
            return self.err("expected a number");
        }
        let text = &self.rest()[..len];
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => self.err(format!("malformed number '{text}'")),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let len = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            return self.err("expected an integer");
        }
        let v = self.rest()[..len].parse::<usize>();
        match v {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => self.err("integer out of range"),
        }
    }

    fn wrap<T>(&self, start: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::InvalidParameter(msg) => Error::InvalidParameter(format!("{msg} (at position {start})")),
            other => other,
        })
    }

    pub(super) fn weight(&mut self) -> Result<WeightSpec> {
        self.skip_ws();
        let start = self.pos;
        if self.eat("const:") {
            let c = self.number()?;
            self.wrap(start, WeightSpec::constant(c))
        } else if self.eat("pot:") {
            let a = self.number()?;
            self.wrap(start, WeightSpec::potential(a))
        } else if self.eat("expl:[") {
            let mut head = vec![self.number()?];
            while self.eat(",") {
                head.push(self.number()?);
            }
            self.expect(";")?;
            self.expect("tail=")?;
            let tail = self.number()?;
            self.expect("]")?;
            self.wrap(start, WeightSpec::explicit(head, tail))
        } else {
            self.err("expected weight 'const:', 'pot:' or 'expl:['")
        }
    }

    pub(super) fn space(&mut self) -> Result<SpaceSpec> {
        self.skip_ws();
        let start = self.pos;
        let spec = if self.eat("lp:") {
            let p = self.number()?;
            SpaceSpec::lp(p)
        } else if self.eat("c0") {
            Ok(SpaceSpec::c0())
        } else if self.eat("lorentz:") {
            self.expect("p=")?;
            let p = self.number()?;
            self.expect(",")?;
            self.expect("q=")?;
            let q = self.number()?;
            self.expect(",")?;
            self.expect("w=")?;
            let w = self.weight()?;
            SpaceSpec::lorentz(p, if q.is_infinite() { None } else { Some(q) }, w)
        } else if self.eat("marcin:") {
            self.expect("w=")?;
            Ok(SpaceSpec::marcinkiewicz(self.weight()?))
        } else if self.eat("garling:") {
            self.expect("p=")?;
            let p = self.number()?;
            self.expect(",")?;
            self.expect("w=")?;
            let w = self.weight()?;
            SpaceSpec::garling(p, w)
        } else if self.eat("vp:") {
            let p = self.number()?;
            SpaceSpec::vp(p)
        } else if self.eat("sw:") {
            self.expect("w=")?;
            Ok(SpaceSpec::sw(self.weight()?))
        } else if self.eat("kt(") {
            let inner = self.space()?;
            self.expect(";")?;
            self.expect("w=")?;
            let w = self.weight()?;
            self.expect(")")?;
            Ok(SpaceSpec::kt(inner, w))
        } else if self.eat("dsum(") {
            let mut parts = vec![self.space()?];
            while self.eat(",") {
                parts.push(self.space()?);
            }
            self.expect(")")?;
            SpaceSpec::dsum(parts)
        } else if self.eat("mixed:") {
            self.expect("q=")?;
            let q = self.number()?;
            self.expect(",")?;
            self.expect("p=")?;
            let p = self.number()?;
            self.expect(",")?;
            self.expect("blocks=")?;
            let mut blocks = vec![self.integer()?];
            loop {
                let save = self.pos;
                if self.eat(",") {
                    self.skip_ws();
                    if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
                        blocks.push(self.integer()?);
                        continue;
                    }
                }
                self.pos = save;
                break;
            }
            SpaceSpec::mixed(q, p, blocks)
        } else {
            return self.err("expected a space (lp, c0, lorentz, marcin, garling, vp, sw, kt, dsum, mixed)");
        };
        self.wrap(start, spec)
    }
}

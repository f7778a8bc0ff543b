use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Global sign choices.
///
/// * `s_m`: reported mean curvature is `s_m · g^μν b_μν / 2`.
/// * `s_omega`: overall sign of the spin connection.
/// * `s_a`: covariant momentum is `p = Π + s_a · A`.
///
/// The default `(-1, -1, +1)` reproduces the reference pseudosphere and
/// helicoid operators checked by the acceptance suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention {
    #[serde(rename = "s_M")]
    pub s_m: i8,
    pub s_omega: i8,
    #[serde(rename = "s_A")]
    pub s_a: i8,
}

impl Default for Convention {
    fn default() -> Convention {
        Convention {
            s_m: -1,
            s_omega: -1,
            s_a: 1,
        }
    }
}

impl Convention {
    pub fn new(s_m: i8, s_omega: i8, s_a: i8) -> Result<Convention, Error> {
        for (name, s) in [("s_M", s_m), ("s_omega", s_omega), ("s_A", s_a)] {
            if s != 1 && s != -1 {
                return Err(Error::Config(format!("{name} must be +1 or -1, got {s}")));
            }
        }
        Ok(Convention { s_m, s_omega, s_a })
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+},{:+},{:+}", self.s_m, self.s_omega, self.s_a)
    }
}

/// Parses `default` or three comma-separated signs `s_M,s_omega,s_A`.
impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Convention, Error> {
        if s.trim() == "default" {
            return Ok(Convention::default());
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("convention `{s}` is not `default` or three signs like -1,-1,+1"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut signs = [0i8; 3];
        for (slot, p) in signs.iter_mut().zip(&parts) {
            *slot = match *p {
                "+1" | "1" | "+" => 1,
                "-1" | "-" => -1,
                _ => return Err(bad()),
            };
        }
        Convention::new(signs[0], signs[1], signs[2])
    }
}

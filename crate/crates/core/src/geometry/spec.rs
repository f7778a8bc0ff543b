use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{ConstTable, Expr, Param, ParamPoint};
use crate::operator::Rect;

/// An excluded open band `range.0 < param < range.1` of the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub param: Param,
    pub range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Exclusion {
    pub fn contains(&self, p: ParamPoint) -> bool {
        let x = p.get(self.param);
        self.range[0] < x && x < self.range[1]
    }
}

/// Parametric embedding `r(u, v)` plus its parameter domain and constants.
///
/// `parameters` fixes the order of the natural basis: the normal is
/// `r_1 × r_2` and frame leg `a` is attached to the `a`-th parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub name: String,
    pub parameters: [Param; 2],
    pub domain: Rect,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclusions: Vec<Exclusion>,
    #[serde(default)]
    pub constants: ConstTable,
    pub embedding: [Expr; 3],
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<SurfaceSpec> {
        let spec: SurfaceSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("surface spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.parameters[0] == self.parameters[1] {
            return Err(Error::Spec("parameters must be u and v in some order".into()));
        }
        for (name, [a, b]) in [("u", self.domain.u), ("v", self.domain.v)] {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Spec(format!("domain for {name} must be a finite [a, b] with a < b")));
            }
        }
        for ex in &self.exclusions {
            if ex.range[0].partial_cmp(&ex.range[1]) != Some(std::cmp::Ordering::Less) {
                return Err(Error::Spec(format!("empty exclusion band {:?}", ex.range)));
            }
        }
        for (name, x) in self.constants.iter() {
            if !x.is_finite() {
                return Err(Error::Spec(format!("constant {name} is not finite")));
            }
        }
        for e in &self.embedding {
            for c in e.constants() {
                if self.constants.get(&c).is_none() {
                    return Err(Error::Spec(format!("embedding uses undeclared constant `{c}`")));
                }
            }
        }
        Ok(())
    }

    pub fn excluded(&self, p: ParamPoint) -> bool {
        self.exclusions.iter().any(|ex| ex.contains(p))
    }

    /// Maximal exclusion-free sub-rectangles of the domain.
    pub fn patches(&self) -> Vec<Rect> {
        let mut out = vec![self.domain];
        for ex in &self.exclusions {
            out = out
                .into_iter()
                .flat_map(|r| {
                    let side = match ex.param {
                        Param::U => r.u,
                        Param::V => r.v,
                    };
                    let pieces = [[side[0], side[1].min(ex.range[0])], [side[0].max(ex.range[1]), side[1]]];
                    pieces
                        .into_iter()
                        .filter(|s| s[0] < s[1])
                        .map(move |s| match ex.param {
                            Param::U => Rect::new(s, r.v),
                            Param::V => Rect::new(r.u, s),
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out
    }

    /// The largest patch, shrunk by 5% per side.
    pub fn quadrature_rect(&self) -> Rect {
        let area = |r: &Rect| (r.u[1] - r.u[0]) * (r.v[1] - r.v[0]);
        self.patches()
            .into_iter()
            .max_by(|a, b| area(a).total_cmp(&area(b)))
            .unwrap_or(self.domain)
            .shrink(0.05)
    }

    /// Whether `r` avoids every exclusion band and lies in the domain.
    pub fn admits_rect(&self, r: &Rect) -> bool {
        self.domain.contains_rect(r) && self.patches().iter().any(|p| p.contains_rect(r))
    }
}

/// Names of the built-in surfaces.
pub const CATALOG: [&str; 7] = [
    "plane",
    "cylinder",
    "sphere",
    "torus",
    "catenoid",
    "pseudosphere",
    "helicoid",
];

const TWO_PI: f64 = std::f64::consts::TAU;

fn entry(
    name: &str,
    parameters: [Param; 2],
    domain: Rect,
    constants: &[(&str, f64)],
    embedding: [&str; 3],
) -> SurfaceSpec {
    let constants = constants
        .iter()
        .fold(ConstTable::new(), |t, (k, x)| t.with(k, *x));
    SurfaceSpec {
        name: name.to_string(),
        parameters,
        domain,
        exclusions: Vec::new(),
        constants,
        embedding: embedding.map(|s| crate::expr::parse(s).expect("catalog expression parses")),
    }
}

/// Looks up a built-in surface.
pub fn catalog(name: &str) -> Result<SurfaceSpec> {
    use Param::{U, V};
    let spec = match name {
        "plane" => entry("plane", [U, V], Rect::new([-1.0, 1.0], [-1.0, 1.0]), &[], ["u", "v", "0"]),
        "cylinder" => entry(
            "cylinder",
            [U, V],
            Rect::new([0.0, TWO_PI], [-1.0, 1.0]),
            &[],
            ["cos(u)", "sin(u)", "v"],
        ),
        "sphere" => entry(
            "sphere",
            [U, V],
            Rect::new([0.2, std::f64::consts::PI - 0.2], [0.0, TWO_PI]),
            &[("rho", 1.5)],
            ["rho*sin(u)*cos(v)", "rho*sin(u)*sin(v)", "rho*cos(u)"],
        ),
        "torus" => entry(
            "torus",
            [U, V],
            Rect::new([0.0, TWO_PI], [0.0, TWO_PI]),
            &[("a", 2.0), ("b", 0.7)],
            ["(a + b*cos(u))*cos(v)", "(a + b*cos(u))*sin(v)", "b*sin(u)"],
        ),
        "catenoid" => entry(
            "catenoid",
            [U, V],
            Rect::new([-1.5, 1.5], [0.0, TWO_PI]),
            &[("c", 1.0)],
            [
                "c*(exp(u/c) + exp(-u/c))/2*cos(v)",
                "c*(exp(u/c) + exp(-u/c))/2*sin(v)",
                "u",
            ],
        ),
        // Listed as (v, u): frame leg 1 is the parallel direction.
        "pseudosphere" => entry(
            "pseudosphere",
            [V, U],
            Rect::new([0.15, 1.35], [0.0, TWO_PI]),
            &[("alpha", 1.0)],
            [
                "alpha*cos(u)*cos(v)",
                "alpha*cos(u)*sin(v)",
                "alpha*(ln(sec(u) + tan(u)) - sin(u))",
            ],
        ),
        "helicoid" => {
            let mut s = entry(
                "helicoid",
                [U, V],
                Rect::new([-3.0, 3.0], [0.0, TWO_PI]),
                &[("beta", 1.0)],
                ["u*cos(v)", "u*sin(v)", "beta*v"],
            );
            s.exclusions.push(Exclusion {
                param: U,
                range: [-0.2, 0.2],
                note: Some("two patches u in [-3,-0.2] and [0.2,3]".into()),
            });
            s
        }
        other => return Err(Error::UnknownSurface(other.to_string())),
    };
    Ok(spec)
}

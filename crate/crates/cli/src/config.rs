//! Run configuration: domain and potential specs, resolution and
//! tolerance overrides. Unknown keys are rejected everywhere.

use lenscale::error::Error;
use lenscale::geometry::{ConvexDomain, Point};
use lenscale::potential::{self, AffinePiece, HeightFunction, Potential, DEFAULT_V_MAX};
use lenscale::scales::{BoundConfig, ScaleOptions};
use lenscale::AnalysisConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Graph {
        a: f64,
        b: f64,
        g1: Vec<[f64; 2]>,
        g2: Vec<[f64; 2]>,
    },
}

impl DomainSpec {
    pub fn build(&self) -> Result<ConvexDomain, Error> {
        match self {
            DomainSpec::Polygon { vertices } => ConvexDomain::from_polygon(
                vertices.iter().map(|v| Point::new(v[0], v[1])).collect(),
            ),
            DomainSpec::Graph { a, b, g1, g2 } => ConvexDomain::from_graph(
                *a,
                *b,
                g1.iter().map(|v| Point::new(v[0], v[1])).collect(),
                g2.iter().map(|v| Point::new(v[0], v[1])).collect(),
            ),
        }
    }
}

fn default_cone_pieces() -> usize {
    256
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant,
    Cone {
        peak: [f64; 2],
        slope: f64,
        #[serde(default = "default_cone_pieces")]
        pieces: usize,
    },
    /// The extremal triangle family; the domain spec must be the matching
    /// right triangle (0,0), (n2,0), (0,n1).
    TriangleExample {
        n1: f64,
        n2: f64,
    },
    /// Trapezoid interpolation between the triangle (m = 0) and the
    /// rectangle (m = 1) with the same ridge height.
    TrapezoidExample {
        n1: f64,
        n2: f64,
        m: f64,
    },
    MinAffine {
        pieces: Vec<[f64; 3]>,
    },
}

impl PotentialSpec {
    pub fn build(&self, domain: &ConvexDomain) -> Result<HeightFunction, Error> {
        match self {
            PotentialSpec::Constant => Ok(potential::constant(domain)),
            PotentialSpec::Cone {
                peak,
                slope,
                pieces,
            } => potential::cone(domain, Point::new(peak[0], peak[1]), *slope, *pieces),
            PotentialSpec::TriangleExample { n1, n2 } => {
                let (_, h) = potential::triangle_example(*n1, *n2)?;
                Ok(h)
            }
            PotentialSpec::TrapezoidExample { n1, n2, m } => {
                let (_, h) = potential::trapezoid_example(*n1, *n2, *m)?;
                Ok(h)
            }
            PotentialSpec::MinAffine { pieces } => potential::make_min_affine(
                pieces
                    .iter()
                    .map(|p| AffinePiece {
                        a: p[0],
                        b: p[1],
                        c: p[2],
                    })
                    .collect(),
                domain,
            ),
        }
    }
}

fn default_seed() -> u64 {
    0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub potential: PotentialSpec,
    /// Grid spacing; defaults to min(1, L1)/16.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub v_max: Option<f64>,
    #[serde(default)]
    pub scales: ScaleOptions,
    #[serde(default)]
    pub bounds: BoundConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    /// Names of checks to run; None enables all. Disabled checks still
    /// appear in the report as skipped.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, Error> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("delta", self.delta.unwrap_or(1.0)),
            ("v_max", self.v_max.unwrap_or(DEFAULT_V_MAX)),
            ("scales.c_tilde", self.scales.c_tilde),
            ("scales.bisect_rel_tol", self.scales.bisect_rel_tol),
            ("analysis.c_max", self.analysis.c_max),
            ("analysis.k_shape", self.analysis.k_shape),
            ("analysis.c_star_floor", self.analysis.c_star_floor),
            ("analysis.mass_floor", self.analysis.mass_floor),
            ("analysis.mass_ceiling", self.analysis.mass_ceiling),
            ("analysis.gradient_ceiling", self.analysis.gradient_ceiling),
            ("analysis.c_psi", self.analysis.c_psi),
            ("analysis.c_agmon", self.analysis.c_agmon),
            ("analysis.agmon_c", self.analysis.agmon_c),
            ("analysis.lc_floor", self.analysis.lc_floor),
            ("bounds.lower_floor", self.bounds.lower_floor),
            ("bounds.l2_upper_k", self.bounds.l2_upper_k),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for &c in &self.analysis.levels {
            if !(0.0 < c && c < 1.0) {
                return Err(Error::InvalidConfig(format!("level {c} outside (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn build_potential(&self, domain: &ConvexDomain) -> Result<Potential, Error> {
        let h = self.potential.build(domain)?;
        Ok(Potential::with_cap(h, self.v_max.unwrap_or(DEFAULT_V_MAX)))
    }
}

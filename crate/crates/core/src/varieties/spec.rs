use serde::{Deserialize, Serialize};

use super::{catalog, scrollcurves, EmbeddedVariety, Realization, VarietyError};
use crate::exactalg::Field;

/// Constructor name and parameters of a catalog variety.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "kebab-case")]
pub enum Constructor {
    Veronese { n: usize, r: usize },
    Segre { n: usize, m: usize },
    Scroll { e: Vec<u32> },
    CompleteIntersection { n: usize, degrees: Vec<u32> },
    PlaneCanonical { d: u32 },
    Tetragonal { e: [u32; 3], b: [u32; 2] },
    Pentagonal { e: [u32; 4], b: [u32; 5] },
    Grassmannian { realization: Realization },
    GorensteinPoints,
    PlaneExtension { d: u32 },
}

impl Constructor {
    pub fn name(&self) -> &'static str {
        match self {
            Constructor::Veronese { .. } => "veronese",
            Constructor::Segre { .. } => "segre",
            Constructor::Scroll { .. } => "scroll",
            Constructor::CompleteIntersection { .. } => "complete-intersection",
            Constructor::PlaneCanonical { .. } => "plane-canonical",
            Constructor::Tetragonal { .. } => "tetragonal",
            Constructor::Pentagonal { .. } => "pentagonal",
            Constructor::Grassmannian { .. } => "g25",
            Constructor::GorensteinPoints => "points5",
            Constructor::PlaneExtension { .. } => "plane-extension",
        }
    }

    /// A short human-readable label.
    pub fn default_label(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            Constructor::Veronese { n, r } => format!("veronese({n},{r})"),
            Constructor::Segre { n, m } => format!("segre({n},{m})"),
            Constructor::Scroll { e } => format!("scroll({})", join(e)),
            Constructor::CompleteIntersection { n, degrees } => format!("ci(P{n};{})", join(degrees)),
            Constructor::PlaneCanonical { d } => format!("plane-canonical({d})"),
            Constructor::Tetragonal { e, b } => format!("tetragonal({};b={})", join(e), join(b)),
            Constructor::Pentagonal { e, b } => format!("pentagonal({};b={})", join(e), join(b)),
            Constructor::Grassmannian { realization } => match realization {
                Realization::Symbolic => "g25(symbolic)".into(),
                Realization::Points => "g25".into(),
            },
            Constructor::GorensteinPoints => "points5".into(),
            Constructor::PlaneExtension { d } => format!("plane-extension({d})"),
        }
    }

    /// Whether the instance is a canonical curve.
    pub fn is_canonical_curve(&self) -> bool {
        match self {
            Constructor::PlaneCanonical { .. } | Constructor::Tetragonal { .. } | Constructor::Pentagonal { .. } => {
                true
            }
            Constructor::CompleteIntersection { n, degrees } => {
                degrees.len() + 1 == *n && degrees.iter().sum::<u32>() as usize == n + 2
            }
            _ => false,
        }
    }
}

/// A reproducible description of a catalog instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarietySpec {
    pub label: String,
    pub constructor: Constructor,
    pub seed: u64,
}

impl VarietySpec {
    pub fn new(constructor: Constructor, seed: u64) -> Self {
        VarietySpec { label: constructor.default_label(), constructor, seed }
    }

    /// Builds the variety over `field`, retrying randomized constructors on
    /// degenerate seeds. The returned spec records the seed that succeeded.
    pub fn build(&self, field: &Field, retry_budget: u32) -> Result<EmbeddedVariety, VarietyError> {
        let f = *field;
        let label = self.label.clone();
        let built = match &self.constructor {
            Constructor::Veronese { n, r } => catalog::veronese(&f, *n, *r),
            Constructor::Segre { n, m } => catalog::segre(&f, *n, *m),
            Constructor::Scroll { e } => catalog::scroll(&f, e),
            Constructor::CompleteIntersection { n, degrees } => {
                catalog::complete_intersection(&f, *n, degrees, self.seed, retry_budget)
            }
            Constructor::PlaneCanonical { d } => catalog::plane_curve_canonical(&f, *d, self.seed, retry_budget),
            Constructor::Tetragonal { e, b } => scrollcurves::tetragonal_curve(&f, *e, *b, self.seed, retry_budget),
            Constructor::Pentagonal { e, b } => scrollcurves::pentagonal_curve(&f, *e, *b, self.seed, retry_budget),
            Constructor::Grassmannian { realization } => catalog::grassmannian_g25(&f, *realization, self.seed),
            Constructor::GorensteinPoints => catalog::gorenstein_points5(&f, self.seed, retry_budget),
            Constructor::PlaneExtension { d } => {
                crate::deform::plane_curve_extension(&f, *d, self.seed, retry_budget)
            }
        }?;
        Ok(built.relabel(label))
    }
}

impl EmbeddedVariety {
    fn relabel(mut self, label: String) -> Self {
        self.meta.label = label.clone();
        self.spec.label = label;
        self
    }
}

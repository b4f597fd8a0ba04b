//! Interchangeable ways of obtaining the Jost matrix of a model, selected by name.
//!
//! | name          | route                                                    |
//! |---------------|----------------------------------------------------------|
//! | `closed-form` | explicit two-channel formula of the Feshbach model       |
//! | `susy`        | generic `[U(∞) − ik]⁻¹ [U(0) − ik]` from the transform   |
//! | `numeric`     | inward integration of the closed-form potential          |

use std::collections::BTreeMap;

use crate::channels::ChannelMomenta;
use crate::error::{Error, Result};
use crate::feshbach::{self, FeshbachParams};
use crate::jost::JostMatrix;
use crate::oracle::{self, OracleConfig, RadialGrid};
use crate::susy::{self, TransformSpec};

pub trait JostSource: Send + Sync {
    fn name(&self) -> &'static str;

    fn jost(&self, momenta: &ChannelMomenta) -> Result<JostMatrix>;

    /// Jost matrix whose open-channel rows equal those of `F(−k)`. Only these rows enter
    /// the physical S-matrix.
    fn jost_reflected(&self, momenta: &ChannelMomenta) -> Result<JostMatrix> {
        self.jost(&momenta.negated())
    }
}

/// Everything a source may need to set itself up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelContext {
    pub params: FeshbachParams,
    pub grid: RadialGrid,
    pub oracle: OracleConfig,
}

pub struct ClosedFormSource {
    params: FeshbachParams,
}

impl ClosedFormSource {
    pub fn new(params: FeshbachParams) -> Self {
        Self { params }
    }
}

impl JostSource for ClosedFormSource {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn jost(&self, momenta: &ChannelMomenta) -> Result<JostMatrix> {
        feshbach::jost_matrix(&self.params, momenta)
    }
}

pub struct SusySource {
    spec: TransformSpec,
    asymptote: Vec<f64>,
}

impl SusySource {
    pub fn new(spec: TransformSpec) -> Result<Self> {
        let asymptote = susy::asymptotic_superpotential(&spec)?.diagonal;
        Ok(Self { spec, asymptote })
    }
}

impl JostSource for SusySource {
    fn name(&self) -> &'static str {
        "susy"
    }

    fn jost(&self, momenta: &ChannelMomenta) -> Result<JostMatrix> {
        susy::nonconservative_jost_with_asymptote(&self.spec, &self.asymptote, momenta)
    }
}

pub struct NumericSource {
    params: FeshbachParams,
    grid: RadialGrid,
    cfg: OracleConfig,
}

impl NumericSource {
    pub fn new(params: FeshbachParams, grid: RadialGrid, cfg: OracleConfig) -> Self {
        Self { params, grid, cfg }
    }

    pub fn potential(&self) -> impl Fn(f64) -> nalgebra::DMatrix<f64> + '_ {
        move |r| feshbach::potential_matrix(&self.params, r).expect("grid radii are nonnegative")
    }
}

impl JostSource for NumericSource {
    fn name(&self) -> &'static str {
        "numeric"
    }

    fn jost(&self, momenta: &ChannelMomenta) -> Result<JostMatrix> {
        oracle::integrate_jost_inward(self.potential(), momenta, &self.grid, &self.cfg)
    }

    fn jost_reflected(&self, momenta: &ChannelMomenta) -> Result<JostMatrix> {
        // −k of a closed channel would grow inward; its row is not needed anyway
        self.jost(&momenta.reflect_open())
    }
}

pub type SourceFactory = fn(&ModelContext) -> Result<Box<dyn JostSource>>;

/// Name → factory table of Jost sources.
pub struct SourceRegistry {
    factories: BTreeMap<&'static str, SourceFactory>,
}

impl SourceRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: SourceFactory) {
        self.factories.insert(name, factory);
    }

    pub fn create(&self, name: &str, ctx: &ModelContext) -> Result<Box<dyn JostSource>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownSource(name.to_string()))?;
        factory(ctx)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }
}

impl Default for SourceRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register("closed-form", |ctx| {
            Ok(Box::new(ClosedFormSource::new(ctx.params)))
        });
        registry.register("susy", |ctx| {
            Ok(Box::new(SusySource::new(ctx.params.transform_spec())?))
        });
        registry.register("numeric", |ctx| {
            Ok(Box::new(NumericSource::new(ctx.params, ctx.grid, ctx.oracle)))
        });
        registry
    }
}

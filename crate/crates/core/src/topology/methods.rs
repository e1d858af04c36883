//! Chern-number methods behind a common trait, selectable by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    chern_dynamic_three_qubit, chern_dynamic_with_init, chern_fhs_nv, chern_fhs_three_qubit, monopole_count_for_model,
    monopole_count_three_qubit, ChernResult, FhsGrid, MethodKind,
};
use crate::dynamics::{InitPolicy, PropagationSettings};
use crate::error::{Error, Result};
use crate::models::{NVModel, NormalizedPoint, ThreeQubitModel};

/// One parameter point of one of the two physical systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SystemPoint {
    Nv { model: NVModel, point: NormalizedPoint },
    ThreeQubit(ThreeQubitModel),
}

impl SystemPoint {
    pub fn system_name(&self) -> &'static str {
        match self {
            SystemPoint::Nv { .. } => "nv",
            SystemPoint::ThreeQubit(_) => "three-qubit",
        }
    }
}

/// Shared knobs; each method reads the ones it needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodContext {
    pub alpha: f64,
    pub settings: PropagationSettings,
    /// NV sweeps only; the three-qubit chain always starts in its ground state.
    pub init: InitPolicy,
    pub fhs_grid: FhsGrid,
}

impl Default for MethodContext {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            settings: PropagationSettings::default(),
            init: InitPolicy::GroundState,
            fhs_grid: FhsGrid::default(),
        }
    }
}

pub trait ChernMethod: Send + Sync {
    /// Canonical registry key.
    fn name(&self) -> &'static str;

    /// Extra keys that resolve to this method.
    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn kind(&self) -> MethodKind;

    fn compute(&self, system: &SystemPoint, ctx: &MethodContext) -> Result<ChernResult>;
}

/// Berry curvature integrated from the simulated `<sy>` deviation.
#[derive(Clone, Copy, Debug, Default)]
pub struct DynamicMethod;

impl ChernMethod for DynamicMethod {
    fn name(&self) -> &'static str {
        "dynamic"
    }

    fn kind(&self) -> MethodKind {
        MethodKind::Dynamic
    }

    fn compute(&self, system: &SystemPoint, ctx: &MethodContext) -> Result<ChernResult> {
        match system {
            SystemPoint::Nv { model, point } => {
                chern_dynamic_with_init(*point, ctx.alpha, model, ctx.init, &ctx.settings)
            }
            SystemPoint::ThreeQubit(model) => chern_dynamic_three_qubit(model, ctx.alpha, &ctx.settings),
        }
    }
}

/// Lattice-gauge ground-band Chern number.
#[derive(Clone, Copy, Debug, Default)]
pub struct FhsMethod;

impl ChernMethod for FhsMethod {
    fn name(&self) -> &'static str {
        "fhs"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["lattice"]
    }

    fn kind(&self) -> MethodKind {
        MethodKind::Fhs
    }

    fn compute(&self, system: &SystemPoint, ctx: &MethodContext) -> Result<ChernResult> {
        match system {
            SystemPoint::Nv { model, point } => chern_fhs_nv(model, *point, ctx.fhs_grid),
            SystemPoint::ThreeQubit(model) => chern_fhs_three_qubit(model, ctx.fhs_grid),
        }
    }
}

/// Geometric count of degeneracy points enclosed by the sweep sphere.
#[derive(Clone, Copy, Debug, Default)]
pub struct MonopoleCountMethod;

impl ChernMethod for MonopoleCountMethod {
    fn name(&self) -> &'static str {
        "monopole-count"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["count"]
    }

    fn kind(&self) -> MethodKind {
        MethodKind::MonopoleCount
    }

    fn compute(&self, system: &SystemPoint, _ctx: &MethodContext) -> Result<ChernResult> {
        Ok(match system {
            SystemPoint::Nv { model, point } => monopole_count_for_model(model, *point),
            SystemPoint::ThreeQubit(model) => monopole_count_three_qubit(model),
        })
    }
}

/// Name-keyed collection of methods.
#[derive(Clone)]
pub struct MethodRegistry {
    entries: BTreeMap<String, Arc<dyn ChernMethod>>,
    canonical: Vec<&'static str>,
}

impl MethodRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
            canonical: Vec::new(),
        }
    }

    /// Registers `method` under its name and aliases, replacing earlier entries.
    pub fn register(&mut self, method: Arc<dyn ChernMethod>) {
        let name = method.name();
        if !self.canonical.contains(&name) {
            self.canonical.push(name);
        }
        for key in std::iter::once(name).chain(method.aliases().iter().copied()) {
            self.entries.insert(key.to_string(), Arc::clone(&method));
        }
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ChernMethod>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownMethod {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    /// Canonical names in registration order.
    pub fn names(&self) -> Vec<&'static str> {
        self.canonical.clone()
    }
}

impl Default for MethodRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(DynamicMethod));
        r.register(Arc::new(FhsMethod));
        r.register(Arc::new(MonopoleCountMethod));
        r
    }
}

impl std::fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MethodRegistry").field("methods", &self.canonical).finish()
    }
}

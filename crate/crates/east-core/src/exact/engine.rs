//! One-stop driver tying the exact solvers together, with caching of the
//! expensive shared artifacts (full spectrum, absorbing eigenseries) so grid
//! scans do not recompute them per query.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::Result;
use crate::model::Configuration;
use crate::Params;

use super::generator::Generator;
use super::hitting::mean_hitting_time_of;
use super::semigroup::{self, SurvivalSeries};
use super::set::StateSet;
use super::spectral::{relaxation_time_of, FullSpectral};
use super::Solved;

pub struct Engine {
    gen: Generator,
    spectral: Mutex<Option<Arc<FullSpectral>>>,
    series: Mutex<HashMap<Vec<u64>, Arc<SurvivalSeries>>>,
}

impl Engine {
    pub fn new(params: &Params) -> Result<Self> {
        Ok(Self {
            gen: Generator::build(params)?,
            spectral: Mutex::new(None),
            series: Mutex::new(HashMap::new()),
        })
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }

    pub fn params(&self) -> &Params {
        self.gen.params()
    }

    fn full_spectral(&self) -> Result<Arc<FullSpectral>> {
        let mut slot = self.spectral.lock().unwrap();
        if let Some(s) = slot.as_ref() {
            return Ok(Arc::clone(s));
        }
        let built = Arc::new(FullSpectral::build(&self.gen)?);
        *slot = Some(Arc::clone(&built));
        Ok(built)
    }

    pub fn survival_series(&self, target: &StateSet) -> Result<Arc<SurvivalSeries>> {
        let key = target.key();
        let mut cache = self.series.lock().unwrap();
        if let Some(s) = cache.get(&key) {
            return Ok(Arc::clone(s));
        }
        let built = Arc::new(SurvivalSeries::build(&self.gen, target)?);
        cache.insert(key, Arc::clone(&built));
        Ok(built)
    }

    pub fn relaxation_time(&self) -> Result<Solved> {
        relaxation_time_of(&self.gen)
    }

    pub fn mixing_time(&self, threshold: f64) -> Result<Solved> {
        let trel = self.relaxation_time()?.value;
        let spectral = self.full_spectral()?;
        semigroup::mixing_time(&self.gen, &spectral, threshold, trel)
    }

    pub fn mean_hitting(&self, start: Configuration, target: &StateSet) -> Result<Solved> {
        mean_hitting_time_of(&self.gen, start, target)
    }

    /// Mean time for the rightmost site to empty, started from `1...10`.
    pub fn hitting_time(&self) -> Result<Solved> {
        let l = self.gen.len();
        self.mean_hitting(
            Configuration::single_right_vacancy(l),
            &StateSet::spin_is(l, l, 1),
        )
    }

    pub fn survival(&self, start: Configuration, target: &StateSet, t: f64) -> Result<f64> {
        semigroup::survival(&self.gen, start, target, t)
    }

    /// Survival through the cached eigenseries, for dense `t` grids.
    pub fn survival_spectral(
        &self,
        start: Configuration,
        target: &StateSet,
        t: f64,
    ) -> Result<f64> {
        Ok(self.survival_series(target)?.eval(start, t))
    }

    pub fn quantile_time(&self, level: f64) -> Result<Solved> {
        let hint = self.hitting_time()?.value;
        semigroup::quantile_time(&self.gen, level, hint)
    }

    /// All four time scales at the conventional thresholds.
    pub fn timescales(&self) -> Result<TimescaleReport> {
        Ok(TimescaleReport {
            l: self.gen.len(),
            q: self.gen.params().q(),
            trel: self.relaxation_time()?,
            tmix: self.mixing_time(0.25)?,
            thit: self.hitting_time()?,
            tquant: self.quantile_time(0.25)?,
        })
    }
}

/// The four characteristic times of one chain, each certified by its method
/// tag and residual.
#[derive(Debug, Clone, Serialize)]
pub struct TimescaleReport {
    pub l: usize,
    pub q: f64,
    pub trel: Solved,
    pub tmix: Solved,
    pub thit: Solved,
    pub tquant: Solved,
}

impl TimescaleReport {
    pub fn csv_header() -> &'static str {
        "L,q,trel,tmix,thit,tquant,method_trel,resid_trel,method_tmix,resid_tmix,\
         method_thit,resid_thit,method_tquant,resid_tquant"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:e},{},{:e},{},{:e},{},{:e}",
            self.l,
            self.q,
            self.trel.value,
            self.tmix.value,
            self.thit.value,
            self.tquant.value,
            self.trel.method,
            self.trel.residual,
            self.tmix.method,
            self.tmix.residual,
            self.thit.method,
            self.thit.residual,
            self.tquant.method,
            self.tquant.residual,
        )
    }
}

/// Smallest `t` with worst-start total variation below `threshold`.
pub fn mixing_time(params: &Params, threshold: f64) -> Result<Solved> {
    Engine::new(params)?.mixing_time(threshold)
}

/// `T(L)` at the given survival level, for the canonical hitting time.
pub fn quantile_time(params: &Params, level: f64) -> Result<Solved> {
    Engine::new(params)?.quantile_time(level)
}

/// `P_start(tau_target > t)`.
pub fn survival(
    params: &Params,
    start: Configuration,
    target: &StateSet,
    t: f64,
) -> Result<f64> {
    let gen = Generator::build(params)?;
    semigroup::survival(&gen, start, target, t)
}

//! Batch evaluation over point sets and rectangular grids, fanned out over a
//! rayon pool when the `parallel` feature is enabled.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Status};
use crate::inverse::InverseMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential execution without the `parallel` feature.
    #[default]
    Parallel,
}

/// `f` over `items`, results in input order.
pub fn map<I, T, F>(items: &[I], exec: Execution, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    #[default]
    Sym,
    Direct,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || self.re_min > self.re_max || self.im_min > self.im_max || self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidArgument(format!("invalid grid {self:?}")));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, count: usize, i: usize) -> f64 {
        if count == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        }
    }

    /// Grid points in row-major order: `im` outer, `re` inner.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.ny)
            .flat_map(|iy| {
                let im = Self::axis(self.im_min, self.im_max, self.ny, iy);
                (0..self.nx).map(move |ix| Complex64::new(Self::axis(self.re_min, self.re_max, self.nx, ix), im))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridStatus {
    #[serde(rename = "ok")]
    Ok,
    #[serde(rename = "exterior")]
    Exterior,
    #[serde(rename = "near_P")]
    NearP,
    #[serde(rename = "seam")]
    Seam,
}

impl GridStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            GridStatus::Ok => "ok",
            GridStatus::Exterior => "exterior",
            GridStatus::NearP => "near_P",
            GridStatus::Seam => "seam",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub re: f64,
    pub im: f64,
    pub status: GridStatus,
    pub s_re: Option<f64>,
    pub s_im: Option<f64>,
}

impl GridRow {
    fn new(w: Complex64, status: GridStatus, s: Option<Complex64>) -> Self {
        Self {
            re: w.re,
            im: w.im,
            status,
            s_re: s.map(|s| s.re),
            s_im: s.map(|s| s.im),
        }
    }
}

/// `S` at one point with the grid status vocabulary. Numerical failures are
/// returned as errors; domain refusals become statuses.
pub fn eval_point(inv: &InverseMap, w: Complex64, mode: EvalMode) -> Result<GridRow> {
    let value = match mode {
        EvalMode::Sym => inv.s_eval(w).map(|s| (s, false)),
        EvalMode::Direct => inv.s_direct(w).map(|s| (s, false)),
        EvalMode::Periodic => inv.s_periodic(w).map(|v| (v.value, v.seam)),
    };
    match value {
        Ok((s, seam)) => Ok(GridRow::new(w, if seam { GridStatus::Seam } else { GridStatus::Ok }, Some(s))),
        Err(Error::Exterior { .. }) => Ok(GridRow::new(w, GridStatus::Exterior, None)),
        Err(Error::NearP { .. }) => Ok(GridRow::new(w, GridStatus::NearP, None)),
        Err(e) => Err(e),
    }
}

/// Evaluates `S` over the grid; rows come back in row-major order regardless
/// of completion order.
pub fn eval_grid(inv: &InverseMap, spec: &GridSpec, mode: EvalMode, exec: Execution) -> Result<Vec<GridRow>> {
    spec.validate()?;
    map(&spec.points(), exec, |w| eval_point(inv, *w, mode)).into_iter().collect()
}

/// Status a grid point must have according to `classify` (symmetric and
/// direct modes).
pub fn expected_status(inv: &InverseMap, w: Complex64) -> GridStatus {
    if inv.region().classify(w, Domain::Omega).status == Status::Exterior {
        GridStatus::Exterior
    } else if inv
        .region()
        .distance_to_p(w)
        .is_some_and(|d| d < inv.cfg.delta_p * inv.phi())
    {
        GridStatus::NearP
    } else {
        GridStatus::Ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse::EvalConfig;
    use crate::params::Params;

    fn inv(n: u32, k: f64) -> InverseMap {
        InverseMap::new(Params::new(n, k).unwrap(), EvalConfig::default()).unwrap()
    }

    #[test]
    fn row_major_order() {
        let spec = GridSpec {
            re_min: 0.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
            nx: 2,
            ny: 3,
        };
        let pts = spec.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], Complex64::new(0.0, -1.0));
        assert_eq!(pts[1], Complex64::new(1.0, -1.0));
        assert_eq!(pts[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn statuses_follow_classification() {
        let m = inv(4, 3.0);
        let phi = m.phi();
        let spec = GridSpec {
            re_min: -2.0 * phi,
            re_max: 2.0 * phi,
            im_min: -2.0 * phi,
            im_max: 2.0 * phi,
            nx: 9,
            ny: 7,
        };
        let rows = eval_grid(&m, &spec, EvalMode::Sym, Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 63);
        for r in &rows {
            let w = Complex64::new(r.re, r.im);
            assert_eq!(r.status, expected_status(&m, w), "{w}");
            assert_eq!(r.s_re.is_some(), r.status == GridStatus::Ok);
        }
        let p = m.region().p.unwrap();
        let near = eval_point(&m, p * (1.0 - 1e-9), EvalMode::Sym).unwrap();
        assert_eq!(near.status, GridStatus::NearP);
    }

    #[test]
    fn parallel_matches_sequential() {
        let m = inv(3, 2.0);
        let spec = GridSpec {
            re_min: -1.0,
            re_max: 1.5,
            im_min: -1.0,
            im_max: 1.2,
            nx: 11,
            ny: 5,
        };
        let a = eval_grid(&m, &spec, EvalMode::Sym, Execution::Sequential).unwrap();
        let b = eval_grid(&m, &spec, EvalMode::Sym, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn periodic_mode_flags_seams() {
        let m = inv(4, 2.0);
        let phi = m.phi();
        let row = eval_point(&m, Complex64::new(3.0 * phi, 0.0), EvalMode::Periodic).unwrap();
        assert_eq!(row.status, GridStatus::Seam);
        let row = eval_point(&m, Complex64::new(4.3 * phi, 0.1), EvalMode::Periodic).unwrap();
        assert_eq!(row.status, GridStatus::Ok);
    }

    #[test]
    fn invalid_grid() {
        let spec = GridSpec {
            re_min: 1.0,
            re_max: 0.0,
            im_min: 0.0,
            im_max: 1.0,
            nx: 1,
            ny: 1,
        };
        assert!(spec.validate().is_err());
    }
}

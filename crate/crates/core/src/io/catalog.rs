//! Tabulating a parametric law's functionals.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Grid;
use crate::survival::{classify_mrl_shape, detect_mrl_shape, DistSpec, ShapeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub t: f64,
    pub density: f64,
    pub survival: f64,
    pub hazard: f64,
    /// `None` where the MRL is undefined.
    pub mrl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub dist: DistSpec,
    pub rows: Vec<CatalogRow>,
    /// Shape from the parameter table.
    pub shape: ShapeLabel,
    /// Shape read off the computed MRL.
    pub detected: ShapeLabel,
    pub undefined_mrl: bool,
}

pub fn catalog(dist: &DistSpec, grid: &Grid) -> Result<Catalog> {
    dist.validate()?;
    let mut undefined = false;
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid.points() {
        let c = dist.eval_core(t)?;
        let mrl = match dist.mrl(t) {
            Ok(m) => Some(m),
            Err(Error::UndefinedMrl(_)) => {
                undefined = true;
                None
            }
            Err(e) => return Err(e),
        };
        rows.push(CatalogRow {
            t,
            density: c.density,
            survival: c.survival,
            hazard: c.hazard,
            mrl,
        });
    }
    Ok(Catalog {
        dist: *dist,
        rows,
        shape: classify_mrl_shape(dist),
        detected: detect_mrl_shape(dist)?,
        undefined_mrl: undefined,
    })
}

/// `t,f,S,h,m,shape` rows; an undefined MRL is written as `undefined`.
pub fn write_catalog<W: Write>(writer: W, cat: &Catalog) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "f", "S", "h", "m", "shape"])?;
    for r in &cat.rows {
        let m = r.mrl.map_or_else(|| "undefined".to_string(), |m| m.to_string());
        w.write_record([
            r.t.to_string(),
            r.density.to_string(),
            r.survival.to_string(),
            r.hazard.to_string(),
            m,
            cat.shape.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

//! Versioned JSON form of a periodic packing.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! yields bit-identical centers, semi-axes and angles.

use serde::{Deserialize, Serialize};

use crate::ellipse::Ellipse;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::periodic::{CellEllipse, PeriodicPacking};

pub const PACKING_FILE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseRecord {
    pub center: [f64; 2],
    pub semi_axes: [f64; 2],
    /// Direction of the first semi-axis, radians.
    pub angle: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingFile {
    pub version: u32,
    pub lambda: f64,
    pub n: usize,
    pub triangle_side: f64,
    pub lattice: [[f64; 2]; 2],
    pub ellipses: Vec<EllipseRecord>,
}

impl PackingFile {
    pub fn from_packing(p: &PeriodicPacking) -> Self {
        let ellipses = p
            .cell
            .iter()
            .map(|ce| {
                let c = ce.ellipse.canonical();
                EllipseRecord {
                    center: [c.center.x, c.center.y],
                    semi_axes: [c.semi_major, c.semi_minor],
                    angle: c.angle,
                    provenance: ce.provenance.to_string(),
                }
            })
            .collect();
        PackingFile {
            version: PACKING_FILE_VERSION,
            lambda: p.lambda,
            n: p.n,
            triangle_side: p.triangle_side,
            lattice: p.lattice.map(|v| [v.x, v.y]),
            ellipses,
        }
    }

    pub fn to_packing(&self) -> Result<PeriodicPacking> {
        if self.version != PACKING_FILE_VERSION {
            return Err(Error::Format(format!("unsupported packing file version {}", self.version)));
        }
        let cell = self
            .ellipses
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let ellipse = Ellipse::new(
                    Vec2::new(r.center[0], r.center[1]),
                    (r.semi_axes[0], r.semi_axes[1]),
                    r.angle,
                )
                .map_err(|e| Error::Format(format!("ellipse {i}: {e}")))?;
                let provenance = r
                    .provenance
                    .parse()
                    .map_err(|e| Error::Format(format!("ellipse {i}: {e}")))?;
                Ok(CellEllipse { ellipse, provenance })
            })
            .collect::<Result<_>>()?;
        Ok(PeriodicPacking {
            lambda: self.lambda,
            n: self.n,
            triangle_side: self.triangle_side,
            lattice: self.lattice.map(|[x, y]| Vec2::new(x, y)),
            cell,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("packing file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

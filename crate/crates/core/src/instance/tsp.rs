use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euclidean TSP on points in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTsp")]
pub struct TspInstance {
    pub n: usize,
    pub coords: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawTsp {
    n: usize,
    coords: Vec<(f64, f64)>,
}

impl TryFrom<RawTsp> for TspInstance {
    type Error = Error;

    fn try_from(raw: RawTsp) -> Result<Self> {
        let t = TspInstance::new(raw.coords)?;
        if t.n != raw.n {
            return Err(Error::InvalidParameter(format!(
                "n={} but {} coordinates",
                raw.n, t.n
            )));
        }
        Ok(t)
    }
}

impl TspInstance {
    pub fn new(coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidParameter("TSP needs at least 2 cities".into()));
        }
        if !coords.iter().all(|(x, y)| x.is_finite() && y.is_finite()) {
            return Err(Error::InvalidParameter("coordinates must be finite".into()));
        }
        Ok(TspInstance {
            n: coords.len(),
            coords,
        })
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        let (x1, y1) = self.coords[a];
        let (x2, y2) = self.coords[b];
        (x1 - x2).hypot(y1 - y2)
    }

    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.dist(a, b)).collect())
            .collect()
    }

    /// Closed tour length, return edge included.
    pub fn tour_length(&self, tour: &[usize]) -> f64 {
        if tour.is_empty() {
            return 0.0;
        }
        let mut len = 0.0;
        for w in tour.windows(2) {
            len += self.dist(w[0], w[1]);
        }
        len + self.dist(tour[tour.len() - 1], tour[0])
    }
}

use serde::{Deserialize, Serialize};

/// JSON wire form of a body, tagged by `kind`.
///
/// ```json
/// {"kind":"ellipsoid","q":[[0.25,0],[0,1]]}
/// {"kind":"pball","p":4,"scale":[1,1]}
/// {"kind":"polygon","vertices":[[1,-1],[1,1],[-1,1],[-1,-1]]}
/// {"kind":"halfspaces","a":[[1,0],[-1,0],[0,1],[0,-1]],"b":[1,1,1,1]}
/// {"kind":"linear","m":[[2,0],[0,1]],"inner":{"kind":"ellipsoid","q":[[1,0],[0,1]]}}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    /// Gauge `sqrt(<x, q x>)`.
    Ellipsoid { q: Vec<Vec<f64>> },
    /// Gauge `(sum |x_i / scale_i|^p)^(1/p)`.
    Pball { p: f64, scale: Vec<f64> },
    /// Counterclockwise vertices with `v[i + n/2] == -v[i]`.
    Polygon { vertices: Vec<[f64; 2]> },
    /// `{ y : <a_i, y> <= b_i }`, rows in exact `(a, b)`, `(-a, b)` pairs.
    Halfspaces { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// The image `m * inner`.
    Linear { m: Vec<Vec<f64>>, inner: Box<BodySpec> },
}

impl BodySpec {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("body specs always serialize")
    }
}

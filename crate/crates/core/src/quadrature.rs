//! Globally adaptive Gauss-Kronrod (7/15) quadrature of vector-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::linalg::compensated_sum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err && self.a == o.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> Vec<f64>>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let d = fc.len();
    let mut k: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for i in 0..d {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let value: Vec<f64> = k.iter().map(|v| v * h).collect();
    let err = k
        .iter()
        .zip(&g)
        .map(|(kv, gv)| ((kv - gv) * h).abs())
        .fold(0.0, f64::max);
    Panel { a, b, value, err }
}

/// Result of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Integral {
    pub value: Vec<f64>,
    pub error: f64,
    pub panels: usize,
}

/// Integrate `f` over `[a, b]` until the summed Kronrod error estimate is at most `tol`
/// or `max_panels` panels have been used.
pub fn integrate<F: Fn(f64) -> Vec<f64>>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Integral {
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let mut total_err = first.err;
    heap.push(first);
    while total_err > tol && heap.len() < max_panels {
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let l = gk15(&f, worst.a, mid);
        let r = gk15(&f, mid, worst.b);
        total_err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let d = panels[0].value.len();
    let value = (0..d)
        .map(|i| compensated_sum(panels.iter().map(|p| p.value[i])))
        .collect();
    let error = compensated_sum(panels.iter().map(|p| p.err));
    Integral {
        value,
        error,
        panels: panels.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| vec![x.powi(7) - 3.0 * x * x], 0.0, 2.0, 1e-14, 10);
        assert!((r.value[0] - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn sqrt_singularity_converges() {
        let r = integrate(|x| vec![x.sqrt(), x.cos()], 0.0, 1.0, 1e-12, 500);
        assert!((r.value[0] - 2.0 / 3.0).abs() < 1e-11);
        assert!((r.value[1] - 1f64.sin()).abs() < 1e-13);
    }
}

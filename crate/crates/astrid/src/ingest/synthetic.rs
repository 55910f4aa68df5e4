//! Synthetic benchmark dataset with a known interaction structure.
//!
//! Four numeric attributes, two balanced classes:
//!
//! * `a1`, `a2` — an XOR-style mixture: class 0 draws the pair from equal
//!   bivariate normals centered at `(+c, +c)` and `(-c, -c)`, class 1 from
//!   `(+c, -c)` and `(-c, +c)` (unit variance, independent coordinates).
//!   Each attribute alone has the same symmetric bimodal marginal in both
//!   classes; only the pair separates them.
//! * `a3` — weak standalone signal: `N(+0.75, 1)` for class 0, `N(-0.75, 1)`
//!   for class 1.
//! * `a4` — pure noise, `N(0, 1)`.
//!
//! The ground-truth grouping is therefore `1,2|3|4`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{AttributeKind, Column, Dataset, Schema};
use crate::seeding;

/// Distance of the mixture centers from the origin along each coordinate.
const XOR_CENTER: f64 = 1.7;
/// Class shift of the weakly informative attribute.
const A3_SHIFT: f64 = 0.75;

/// Generate the synthetic dataset: `n_per_class` rows for each of the two
/// classes, in class order. Bitwise deterministic given `seed`.
pub fn generate_synthetic(n_per_class: usize, seed: u64) -> Dataset {
    let mut rng = seeding::derive_rng(&[&seed.to_le_bytes(), b"synthetic"]);
    let n = 2 * n_per_class;
    let mut a1 = Vec::with_capacity(n);
    let mut a2 = Vec::with_capacity(n);
    let mut a3 = Vec::with_capacity(n);
    let mut a4 = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);

    for class in 0..2usize {
        for _ in 0..n_per_class {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let (c1, c2) = if class == 0 {
                (sign * XOR_CENTER, sign * XOR_CENTER)
            } else {
                (sign * XOR_CENTER, -sign * XOR_CENTER)
            };
            let shift = if class == 0 { A3_SHIFT } else { -A3_SHIFT };
            a1.push(c1 + rng.sample::<f64, _>(StandardNormal));
            a2.push(c2 + rng.sample::<f64, _>(StandardNormal));
            a3.push(shift + rng.sample::<f64, _>(StandardNormal));
            a4.push(rng.sample::<f64, _>(StandardNormal));
            labels.push(class);
        }
    }

    Dataset::new(
        Schema {
            attribute_names: vec!["a1".into(), "a2".into(), "a3".into(), "a4".into()],
            attribute_kinds: vec![AttributeKind::Numeric; 4],
            class_names: vec!["c0".into(), "c1".into()],
        },
        vec![
            Column::Numeric(a1),
            Column::Numeric(a2),
            Column::Numeric(a3),
            Column::Numeric(a4),
        ],
        labels,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Value;

    #[test]
    fn shapes_and_determinism() {
        let data = generate_synthetic(500, 1);
        assert_eq!(data.n_rows(), 1000);
        assert_eq!(data.n_attributes(), 4);
        assert_eq!(data.class_names(), &["c0", "c1"]);
        assert!(data.validate().is_empty());

        assert_eq!(generate_synthetic(500, 1), data);
        assert_ne!(generate_synthetic(500, 2), data);

        let tiny = generate_synthetic(1, 0);
        assert_eq!(tiny.n_rows(), 2);
    }

    fn column_values(data: &Dataset, j: usize) -> Vec<f64> {
        (0..data.n_rows())
            .map(|i| match data.cell(i, j) {
                Value::Num(x) => x,
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn attribute_one_is_marginally_uninformative() {
        let n = 5000;
        let data = generate_synthetic(n, 7);
        let values = column_values(&data, 0);
        let mut per_class: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for (x, &c) in values.iter().zip(data.labels()) {
            per_class[c].push(*x);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
        let (m0, m1) = (mean(&per_class[0]), mean(&per_class[1]));
        let se = (var(&per_class[0], m0) / n as f64 + var(&per_class[1], m1) / n as f64).sqrt();
        assert!(
            (m0 - m1).abs() < 3.0 * se,
            "per-class means {m0:.4} vs {m1:.4} differ by more than 3 SE ({se:.4})"
        );
    }

    #[test]
    fn noise_attribute_is_uncorrelated_with_the_class() {
        let data = generate_synthetic(5000, 11);
        let values = column_values(&data, 3);
        let labels: Vec<f64> = data.labels().iter().map(|&c| c as f64).collect();
        let n = values.len() as f64;
        let mx = values.iter().sum::<f64>() / n;
        let my = labels.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for (x, y) in values.iter().zip(labels.iter()) {
            cov += (x - mx) * (y - my);
            vx += (x - mx) * (x - mx);
            vy += (y - my) * (y - my);
        }
        let r = cov / (vx.sqrt() * vy.sqrt());
        assert!(r.abs() < 0.05, "correlation {r}");
    }
}

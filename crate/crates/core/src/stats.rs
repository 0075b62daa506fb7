// Small numeric helpers shared by the analysis, theory and harness modules.

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Weighted least-squares line `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Weighted root-mean-square residual.
    pub rms: f64,
}

/// Fits a line through `(x, y, weight)` triples. Needs at least two distinct x.
pub(crate) fn weighted_line_fit(points: &[(f64, f64, f64)]) -> Option<LineFit> {
    let w: f64 = points.iter().map(|p| p.2).sum();
    if points.len() < 2 || w <= 0.0 {
        return None;
    }
    let mx = points.iter().map(|p| p.2 * p.0).sum::<f64>() / w;
    let my = points.iter().map(|p| p.2 * p.1).sum::<f64>() / w;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Some(LineFit {
        slope,
        intercept,
        rms: (sse / w).sqrt(),
    })
}

pub(crate) fn line_fit(points: &[(f64, f64)]) -> Option<LineFit> {
    let weighted: Vec<_> = points.iter().map(|&(x, y)| (x, y, 1.0)).collect();
    weighted_line_fit(&weighted)
}

/// Pool-adjacent-violators fit of a nonincreasing sequence.
pub(crate) fn isotonic_nonincreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    // blocks of (mean, weight, len)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() >= 2 {
            let (b, a) = (blocks[blocks.len() - 1], blocks[blocks.len() - 2]);
            if a.0 >= b.0 {
                break;
            }
            let w = a.1 + b.1;
            let mean = if w > 0.0 {
                (a.0 * a.1 + b.0 * b.1) / w
            } else {
                (a.0 + b.0) / 2.0
            };
            blocks.truncate(blocks.len() - 2);
            blocks.push((mean, w, a.2 + b.2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, _, len)| std::iter::repeat_n(m, len))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-13)).abs() < 1e-18);
    }

    #[test]
    fn exact_line_is_recovered() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let fit = line_fit(&pts).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.rms < 1e-12);
    }

    #[test]
    fn isotonic_pools_violations() {
        let fit = isotonic_nonincreasing(&[1.0, 0.6, 0.8, 0.2, 0.3, 0.0], &[1.0; 6]);
        assert_eq!(fit.len(), 6);
        assert!(fit.windows(2).all(|w| w[0] >= w[1]));
        assert!((fit[1] - 0.7).abs() < 1e-12 && (fit[2] - 0.7).abs() < 1e-12);
        assert!((fit[3] - 0.25).abs() < 1e-12);
    }
}

//! Uniform bucket grid for nearest-sample lookups.

use super::space::Topology;

#[derive(Debug, Clone)]
pub(crate) struct NearestIndex {
    dim: usize,
    bins: Vec<usize>,
    lo: Vec<f64>,
    width: Vec<f64>,
    circle: Vec<bool>,
    start: Vec<u32>,
    items: Vec<u32>,
}

pub(crate) fn coord_delta(a: f64, b: f64, circle: bool) -> f64 {
    let d = (a - b).abs();
    if circle {
        d.min(1.0 - d)
    } else {
        d
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64], topology: &[Topology]) -> f64 {
    a.iter()
        .zip(b)
        .zip(topology)
        .map(|((x, y), t)| {
            let d = coord_delta(*x, *y, *t == Topology::Circle);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

impl NearestIndex {
    pub(crate) fn build(dim: usize, coords: &[f64], topology: &[Topology]) -> Self {
        let n = coords.len() / dim;
        let mut per = ((n as f64).powf(1.0 / dim as f64).round() as usize).max(1);
        while per > 1 && per.saturating_pow(dim as u32) > 4 * n.max(1) {
            per -= 1;
        }
        let circle: Vec<bool> = topology.iter().map(|t| *t == Topology::Circle).collect();
        let mut lo = vec![0.0; dim];
        let mut width = vec![1.0; dim];
        let mut bins = vec![1usize; dim];
        for c in 0..dim {
            if circle[c] {
                lo[c] = 0.0;
                bins[c] = per;
                width[c] = 1.0 / per as f64;
                continue;
            }
            let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in 0..n {
                let x = coords[p * dim + c];
                min = min.min(x);
                max = max.max(x);
            }
            let span = max - min;
            lo[c] = if n > 0 { min } else { 0.0 };
            if span > 0.0 {
                bins[c] = per;
                width[c] = span / per as f64;
            }
        }
        let total: usize = bins.iter().product();
        let mut index = NearestIndex {
            dim,
            bins,
            lo,
            width,
            circle,
            start: vec![0; total + 1],
            items: vec![0; n],
        };
        let keys: Vec<usize> = (0..n)
            .map(|p| index.flat(&index.bucket_of(&coords[p * dim..(p + 1) * dim])))
            .collect();
        for &k in &keys {
            index.start[k + 1] += 1;
        }
        for k in 0..total {
            index.start[k + 1] += index.start[k];
        }
        let mut fill: Vec<u32> = index.start[..total].to_vec();
        for (p, &k) in keys.iter().enumerate() {
            index.items[fill[k] as usize] = p as u32;
            fill[k] += 1;
        }
        index
    }

    fn bucket_of(&self, q: &[f64]) -> Vec<isize> {
        (0..self.dim)
            .map(|c| {
                let x = if self.circle[c] { q[c].rem_euclid(1.0) } else { q[c] };
                let b = ((x - self.lo[c]) / self.width[c]).floor();
                let max = self.bins[c] as isize - 1;
                if b.is_nan() {
                    0
                } else {
                    (b as isize).clamp(0, max)
                }
            })
            .collect()
    }

    fn flat(&self, b: &[isize]) -> usize {
        let mut k = 0usize;
        for c in 0..self.dim {
            k = k * self.bins[c] + b[c] as usize;
        }
        k
    }

    /// Allowed offset range per coordinate around `center` so that every
    /// bucket is visited exactly once.
    fn offset_range(&self, c: usize, center: isize) -> (isize, isize) {
        let b = self.bins[c] as isize;
        if self.circle[c] {
            (-((b - 1) / 2), b / 2)
        } else {
            (-center, b - 1 - center)
        }
    }

    /// Nearest stored point to `q`, skipping `exclude`, searching no farther
    /// than `max_dist`. Returns `(index, distance)`.
    pub(crate) fn nearest(
        &self,
        coords: &[f64],
        topology: &[Topology],
        q: &[f64],
        exclude: Option<usize>,
        max_dist: f64,
    ) -> Option<(usize, f64)> {
        if self.items.is_empty() {
            return None;
        }
        let center = self.bucket_of(q);
        let ranges: Vec<(isize, isize)> = (0..self.dim)
            .map(|c| self.offset_range(c, center[c]))
            .collect();
        let max_ring = ranges
            .iter()
            .map(|(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()))
            .max()
            .unwrap_or(0);
        let min_width = (0..self.dim)
            .filter(|&c| self.bins[c] > 1)
            .map(|c| self.width[c])
            .fold(f64::INFINITY, f64::min);

        let mut best: Option<(usize, f64)> = None;
        let mut offset = vec![0isize; self.dim];
        let mut bucket = vec![0isize; self.dim];
        for r in 0..=max_ring as isize {
            self.visit_ring(r, &ranges, &mut offset, 0, &mut |off: &[isize]| {
                for c in 0..self.dim {
                    let b = center[c] + off[c];
                    bucket[c] = if self.circle[c] {
                        b.rem_euclid(self.bins[c] as isize)
                    } else {
                        b
                    };
                }
                let k = self.flat(&bucket);
                for &p in &self.items[self.start[k] as usize..self.start[k + 1] as usize] {
                    let p = p as usize;
                    if Some(p) == exclude {
                        continue;
                    }
                    let d = distance(&coords[p * self.dim..(p + 1) * self.dim], q, topology);
                    match best {
                        Some((bp, bd)) if bd < d || (bd == d && bp < p) => {}
                        _ => best = Some((p, d)),
                    }
                }
            });
            let reach = r as f64 * min_width;
            if let Some((_, d)) = best {
                if d <= reach {
                    break;
                }
            }
            if reach > max_dist {
                break;
            }
        }
        best.filter(|(_, d)| *d <= max_dist)
    }

    fn visit_ring(
        &self,
        r: isize,
        ranges: &[(isize, isize)],
        offset: &mut Vec<isize>,
        c: usize,
        f: &mut impl FnMut(&[isize]),
    ) {
        if c == self.dim {
            if offset.iter().any(|o| o.abs() == r) || r == 0 {
                f(offset);
            }
            return;
        }
        let (lo, hi) = ranges[c];
        for o in lo.max(-r)..=hi.min(r) {
            offset[c] = o;
            self.visit_ring(r, ranges, offset, c + 1, f);
        }
    }
}

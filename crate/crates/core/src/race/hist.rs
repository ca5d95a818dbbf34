use std::f64::consts::PI;
use std::io::Write;

use super::RaceError;
use crate::decomp::AnglePrime;
use crate::fmt::sig9;
use crate::numerics::pearson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleKind {
    Theta,
    ThetaTilde,
}

impl AngleKind {
    pub fn of(self, ap: &AnglePrime) -> f64 {
        match self {
            AngleKind::Theta => ap.theta,
            AngleKind::ThetaTilde => ap.theta_tilde,
        }
    }

    /// The overlay curve: `cos t/cos 2t − ½` for `θ`, `1/cos t − ½` for `θ̃`.
    pub fn secondary_term(self, t: f64) -> f64 {
        match self {
            AngleKind::Theta => t.cos() / (2.0 * t).cos() - 0.5,
            AngleKind::ThetaTilde => 1.0 / t.cos() - 0.5,
        }
    }

    /// Poles of the secondary term in `(0, π)`.
    pub fn poles(self) -> &'static [f64] {
        match self {
            AngleKind::Theta => &[PI / 4.0, 3.0 * PI / 4.0],
            AngleKind::ThetaTilde => &[PI / 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramSpec {
    pub bins: usize,
    pub angle: AngleKind,
}

impl HistogramSpec {
    pub fn new(bins: usize, angle: AngleKind) -> Result<Self, RaceError> {
        if bins < 2 {
            return Err(RaceError::Histogram(format!("need at least 2 bins, got {bins}")));
        }
        Ok(HistogramSpec { bins, angle })
    }

    pub fn width(&self) -> f64 {
        PI / self.bins as f64
    }

    pub fn center(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) * self.width()
    }

    pub fn bin_of(&self, t: f64) -> usize {
        ((t / self.width()) as usize).min(self.bins - 1)
    }

    /// The bins just below and just above `t`. When `t` falls inside a bin
    /// that bin is skipped.
    pub fn neighbours(&self, t: f64) -> (usize, usize) {
        let k = t / self.width();
        let nearest = k.round();
        if (k - nearest).abs() < 1e-9 {
            let b = nearest as usize;
            (b.saturating_sub(1), b.min(self.bins - 1))
        } else {
            let b = k.floor() as usize;
            (b.saturating_sub(1), (b + 1).min(self.bins - 1))
        }
    }
}

impl Default for HistogramSpec {
    fn default() -> Self {
        HistogramSpec { bins: 200, angle: AngleKind::Theta }
    }
}

/// Bin counts of an angle over `[0, π]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleHistogram {
    spec: HistogramSpec,
    counts: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistRow {
    pub bin_center: f64,
    pub count: u64,
    pub deviation: f64,
    pub prediction: f64,
}

impl AngleHistogram {
    pub fn new(spec: HistogramSpec) -> Result<Self, RaceError> {
        HistogramSpec::new(spec.bins, spec.angle)?;
        Ok(AngleHistogram { spec, counts: vec![0; spec.bins] })
    }

    pub fn spec(&self) -> HistogramSpec {
        self.spec
    }

    pub fn add_angle(&mut self, t: f64) {
        let b = self.spec.bin_of(t);
        self.counts[b] += 1;
    }

    pub fn add(&mut self, ap: &AnglePrime) {
        self.add_angle(self.spec.angle.of(ap));
    }

    /// Bin counts commute, so shards can be merged in any order.
    pub fn merge(&mut self, other: &AngleHistogram) -> Result<(), RaceError> {
        if other.spec != self.spec {
            return Err(RaceError::Histogram("cannot merge histograms with different specs".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn rows(&self) -> Vec<HistRow> {
        let mean = self.total() as f64 / self.spec.bins as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &count)| {
                let c = self.spec.center(i);
                HistRow {
                    bin_center: c,
                    count,
                    deviation: count as f64 - mean,
                    prediction: self.spec.angle.secondary_term(c),
                }
            })
            .collect()
    }

    /// Deviation signs of the bins flanking each pole, `(below, above)`.
    pub fn pole_signatures(&self) -> Vec<(f64, f64, f64)> {
        let rows = self.rows();
        self.spec
            .angle
            .poles()
            .iter()
            .map(|&t| {
                let (lo, hi) = self.spec.neighbours(t);
                (t, rows[lo].deviation, rows[hi].deviation)
            })
            .collect()
    }

    /// Pearson correlation of deviation against the secondary term with the
    /// pole-flanking bins left out.
    pub fn overlay_correlation(&self) -> Option<f64> {
        let mut skip = Vec::new();
        for &t in self.spec.angle.poles() {
            let (lo, hi) = self.spec.neighbours(t);
            skip.extend([lo, hi]);
        }
        let (dev, pred): (Vec<f64>, Vec<f64>) = self
            .rows()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, r)| (r.deviation, r.prediction))
            .unzip();
        pearson(&dev, &pred)
    }
}

pub const HIST_CSV_HEADER: &str = "bin_center,count,deviation,prediction";

impl AngleHistogram {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{HIST_CSV_HEADER}")?;
        for r in self.rows() {
            writeln!(w, "{},{},{},{}", sig9(r.bin_center), r.count, sig9(r.deviation), sig9(r.prediction))?;
        }
        Ok(())
    }
}

use serde::{Deserialize, Serialize};

use crate::worldview::Point;

use super::geometry::{Zone, ZoneKind};

/// Peak bandwidth, reached by coincident agents.
pub const B_MAX: u32 = 10;

/// Symmetric bandwidth matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkMatrix(pub Vec<Vec<u32>>);

impl LinkMatrix {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.0[i][j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.0[i]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.0
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.0[i][i] == 0 && (0..n).all(|j| self.0[i][j] == self.0[j][i]))
    }

    /// Zero every link for which `keep(i, j)` is false.
    pub fn mask(&mut self, keep: impl Fn(usize, usize) -> bool) {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if !keep(i, j) {
                    self.0[i][j] = 0;
                }
            }
        }
    }
}

/// Linear decay from [`B_MAX`] at distance 0 to 0 at `d_max`; links crossing
/// a cut-off zone or touching a disabled radio are 0.
pub fn compute_links(positions: &[Point], zones: &[Zone], radios: &[bool], d_max: f64) -> LinkMatrix {
    let n = positions.len();
    let cutoffs: Vec<&Zone> = zones.iter().filter(|z| z.kind == ZoneKind::CommCutoff).collect();
    let mut m = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if !radios[i] || !radios[j] {
                continue;
            }
            let (a, b) = (positions[i], positions[j]);
            if cutoffs.iter().any(|z| z.rect.intersects_segment(a, b)) {
                continue;
            }
            let raw = f64::from(B_MAX) * (1.0 - a.distance(b) / d_max);
            let bw = raw.round().clamp(0.0, f64::from(B_MAX)) as u32;
            m[i][j] = bw;
            m[j][i] = bw;
        }
    }
    LinkMatrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::geometry::Rect;

    #[test]
    fn decay_and_boundaries() {
        let d = 100.0;
        let pts = [Point::new(0.0, 0.0), Point::new(0.0, 0.0), Point::new(100.0, 0.0), Point::new(0.0, 26.0)];
        let m = compute_links(&pts, &[], &[true; 4], d);
        assert_eq!(m.get(0, 1), B_MAX);
        assert_eq!(m.get(0, 2), 0);
        // 10 * 0.74 = 7.4 rounds to 7.
        assert_eq!(m.get(0, 3), 7);
        assert!(m.is_symmetric());
    }

    #[test]
    fn cutoff_and_radio_sever() {
        let pts = [Point::new(10.0, 50.0), Point::new(90.0, 50.0), Point::new(20.0, 50.0)];
        let wall = Zone {
            kind: ZoneKind::CommCutoff,
            rect: Rect::new(45.0, 0.0, 55.0, 100.0).unwrap(),
        };
        let m = compute_links(&pts, &[wall], &[true; 3], 141.0);
        assert_eq!(m.get(0, 1), 0);
        assert!(m.get(0, 2) > 0);
        let m = compute_links(&pts, &[], &[true, true, false], 141.0);
        assert_eq!(m.get(0, 2), 0);
        assert!(m.get(0, 1) > 0);
    }
}

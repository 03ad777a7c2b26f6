use std::collections::BTreeSet;

use crate::agent::AgentId;
use crate::worldview::Point;

use super::config::{Perturbation, Scenario};
use super::geometry::{Rect, Zone, ZoneKind};
use super::links::LinkMatrix;

/// Half-width cap of an inserted separating strip, in meters.
const STRIP_HALF_WIDTH: f64 = 2.0;

/// Radio state for every agent at `tick`.
pub fn radios(scenario: &Scenario, n: usize, tick: u64) -> Vec<bool> {
    let mut on = vec![true; n];
    if let Scenario::IsolatedAgent { target, at_tick } = scenario {
        if tick >= *at_tick {
            on[target.0] = false;
        }
    }
    on
}

/// The active cut, if the scenario has one in force at `tick`.
pub fn active_cut(scenario: &Scenario, tick: u64) -> Option<&BTreeSet<AgentId>> {
    match scenario {
        Scenario::Bipartition { cut, at_tick } if tick >= *at_tick => Some(cut),
        _ => None,
    }
}

/// Zero every link between the cut and its complement.
pub fn sever(links: &mut LinkMatrix, cut: &BTreeSet<AgentId>) {
    links.mask(|i, j| cut.contains(&AgentId(i)) == cut.contains(&AgentId(j)));
}

/// A full-span cut-off strip between the two sides, when their positions are
/// separable along one axis. Checks vertical strips first.
pub fn separator(positions: &[Point], cut: &BTreeSet<AgentId>, width: f64, height: f64) -> Option<Zone> {
    let (inside, outside): (Vec<Point>, Vec<Point>) = {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, p) in positions.iter().enumerate() {
            if cut.contains(&AgentId(i)) {
                a.push(*p);
            } else {
                b.push(*p);
            }
        }
        (a, b)
    };
    let gap = |lo: &[Point], hi: &[Point], axis: fn(&Point) -> f64| {
        let top = lo.iter().map(axis).fold(f64::NEG_INFINITY, f64::max);
        let bottom = hi.iter().map(axis).fold(f64::INFINITY, f64::min);
        (top < bottom).then(|| {
            let mid = (top + bottom) / 2.0;
            let half = ((bottom - top) / 4.0).min(STRIP_HALF_WIDTH);
            (mid - half, mid + half)
        })
    };
    let x = |p: &Point| p.x;
    let y = |p: &Point| p.y;
    let vertical = gap(&inside, &outside, x).or_else(|| gap(&outside, &inside, x));
    if let Some((a, b)) = vertical {
        return Rect::new(a, 0.0, b, height).ok().map(|rect| Zone {
            kind: ZoneKind::CommCutoff,
            rect,
        });
    }
    let horizontal = gap(&inside, &outside, y).or_else(|| gap(&outside, &inside, y));
    horizontal.and_then(|(a, b)| {
        Rect::new(0.0, a, width, b).ok().map(|rect| Zone {
            kind: ZoneKind::CommCutoff,
            rect,
        })
    })
}

pub fn due(perturbations: &[Perturbation], tick: u64) -> impl Iterator<Item = &Perturbation> {
    perturbations.iter().filter(move |p| p.tick == tick)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolation_starts_at_fault_tick() {
        let s = Scenario::IsolatedAgent { target: AgentId(3), at_tick: 5 };
        assert!(radios(&s, 4, 4).iter().all(|r| *r));
        assert_eq!(radios(&s, 4, 5), vec![true, true, true, false]);
        assert_eq!(radios(&Scenario::AllSync, 2, 50), vec![true, true]);
    }

    #[test]
    fn sever_and_separate() {
        let cut: BTreeSet<_> = [AgentId(0), AgentId(2)].into();
        let mut m = LinkMatrix(vec![vec![0, 5, 6], vec![5, 0, 7], vec![6, 7, 0]]);
        sever(&mut m, &cut);
        assert_eq!(m.0, vec![vec![0, 0, 6], vec![0, 0, 0], vec![6, 0, 0]]);

        let pts = [Point::new(10.0, 10.0), Point::new(80.0, 10.0), Point::new(30.0, 90.0)];
        let z = separator(&pts, &cut, 100.0, 100.0).unwrap();
        assert_eq!(z.kind, ZoneKind::CommCutoff);
        assert!(z.rect.x_min > 30.0 && z.rect.x_max < 80.0);
        assert_eq!((z.rect.y_min, z.rect.y_max), (0.0, 100.0));

        let mixed = [Point::new(10.0, 10.0), Point::new(20.0, 20.0), Point::new(30.0, 30.0)];
        assert!(separator(&mixed, &cut, 100.0, 100.0).is_none());
    }
}

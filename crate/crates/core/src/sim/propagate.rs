use crate::worldview::Worldview;

use super::links::LinkMatrix;

/// One synchronous gossip round.
///
/// Every pair `(i, j)`, `i < j`, whose link reaches `threshold` swaps full
/// state. Receivers adopt a sender's record about agent `k` only when the
/// sender's freshness for `k` is strictly newer. Senders are read as they
/// were before the round, so information travels one hop per call.
pub fn propagate(worldviews: &[Worldview], links: &LinkMatrix, threshold: u32) -> Vec<Worldview> {
    let n = worldviews.len();
    let mut out = worldviews.to_vec();
    for i in 0..n {
        for j in (i + 1)..n {
            if links.get(i, j) < threshold {
                continue;
            }
            absorb(&mut out[i], &worldviews[j]);
            absorb(&mut out[j], &worldviews[i]);
        }
    }
    out
}

fn absorb(receiver: &mut Worldview, sender: &Worldview) {
    for k in 0..receiver.len() {
        if sender.freshness[k] > receiver.freshness[k] {
            receiver.records[k] = sender.records[k].clone();
            receiver.freshness[k] = sender.freshness[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::AgentId;
    use crate::worldview::{AgentRecord, Level, Point};

    fn fleet_views(n: usize) -> Vec<Worldview> {
        let rec = AgentRecord {
            location: Point::new(0.0, 0.0),
            science_zone: false,
            battery: Level::FULL,
            cpu: Level::EMPTY,
            actions: vec![],
            comm: vec![0; n],
        };
        (0..n).map(|i| Worldview::new(AgentId(i), vec![rec.clone(); n], 0).unwrap()).collect()
    }

    fn change_battery(views: &mut [Worldview], agent: usize, pct: u8, tick: u64) {
        views[agent].records[agent].battery = Level::new(pct).unwrap();
        views[agent].freshness[agent] = tick;
    }

    fn chain_links(n: usize, bw: u32) -> LinkMatrix {
        LinkMatrix((0..n).map(|i| (0..n).map(|j| if i.abs_diff(j) == 1 { bw } else { 0 }).collect()).collect())
    }

    #[test]
    fn weak_link_blocks_exchange() {
        let mut v = fleet_views(2);
        change_battery(&mut v, 0, 50, 1);
        let out = propagate(&v, &chain_links(2, 1), 2);
        assert_eq!(out, v);
    }

    #[test]
    fn direct_exchange_in_one_round() {
        let mut v = fleet_views(2);
        change_battery(&mut v, 0, 50, 1);
        let out = propagate(&v, &chain_links(2, 5), 2);
        assert_eq!(out[1].records[0].battery.percent(), 50);
        assert_eq!(out[1].freshness[0], 1);
    }

    #[test]
    fn two_hops_take_two_rounds() {
        let links = chain_links(3, 9);
        let mut v = fleet_views(3);
        change_battery(&mut v, 0, 40, 1);
        let r1 = propagate(&v, &links, 2);
        assert_eq!(r1[1].records[0].battery.percent(), 40);
        assert_eq!(r1[2].records[0].battery.percent(), 100);
        let r2 = propagate(&r1, &links, 2);
        assert_eq!(r2[2].records[0].battery.percent(), 40);
    }

    #[test]
    fn ego_entries_are_never_overwritten() {
        let mut v = fleet_views(2);
        change_battery(&mut v, 0, 60, 3);
        v[1].records[0].battery = Level::new(20).unwrap();
        v[1].freshness[0] = 2;
        let out = propagate(&v, &chain_links(2, 5), 2);
        assert_eq!(out[0].records[0].battery.percent(), 60);
    }
}

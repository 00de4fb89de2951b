//! Binary tree of path segments with a sorted heuristic index.
//!
//! Every node stores the curvature segment leading to it from its parent and
//! is addressed by its locator, the string of `L`/`R` turns from the root.
//! The index maps distance-to-goal keys to locators so the most promising
//! node can be expanded next. A node whose both children exist can no longer
//! expand and is dropped from the index.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::curvature::{end_state, integrate, CurvatureProfile, PlannerState};
use crate::error::{Error, Result};
use crate::world::Point25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::L => 'L',
            Side::R => 'R',
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

/// Path from the root as a string over `{L, R}`; the root is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct Locator(String);

impl Locator {
    pub fn root() -> Self {
        Self(String::new())
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.chars().all(|c| c == 'L' || c == 'R') {
            Ok(Self(s.to_owned()))
        } else {
            Err(Error::UnknownLocator(s.to_owned()))
        }
    }

    pub fn child(&self, side: Side) -> Self {
        let mut s = self.0.clone();
        s.push(side.letter());
        Self(s)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("<root>")
        } else {
            f.write_str(&self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Ordered multimap from distance-to-goal to locator. Equal keys pop in
/// insertion order.
#[derive(Debug, Clone, Default)]
pub struct HeuristicIndex {
    entries: BTreeMap<(Key, u64), Locator>,
    by_locator: HashMap<Locator, (Key, u64)>,
    counter: u64,
}

impl HeuristicIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds an entry; a locator already present is re-keyed.
    pub fn push(&mut self, key: f64, locator: Locator) {
        self.remove(&locator);
        let slot = (Key(key), self.counter);
        self.counter += 1;
        self.by_locator.insert(locator.clone(), slot);
        self.entries.insert(slot, locator);
    }

    pub fn contains(&self, locator: &Locator) -> bool {
        self.by_locator.contains_key(locator)
    }

    pub fn remove(&mut self, locator: &Locator) -> Option<f64> {
        let slot = self.by_locator.remove(locator)?;
        self.entries.remove(&slot);
        Some(slot.0 .0)
    }

    pub fn peek_min(&self) -> Result<(&Locator, f64)> {
        self.entries
            .iter()
            .next()
            .map(|((k, _), loc)| (loc, k.0))
            .ok_or(Error::EmptyIndex)
    }

    pub fn pop_min(&mut self) -> Result<(Locator, f64)> {
        let ((key, _), loc) = self.entries.pop_first().ok_or(Error::EmptyIndex)?;
        self.by_locator.remove(&loc);
        Ok((loc, key.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Locator)> {
        self.entries.iter().map(|((k, _), l)| (k.0, l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    /// In the index, awaiting expansion.
    Open,
    /// Both children exist.
    Expanded,
    /// Closed after an exhausted sweep.
    Pruned,
    /// Removed from the index by a pop.
    Popped,
}

#[derive(Debug, Clone)]
pub struct PathNode {
    pub value: CurvatureProfile,
    pub entry_state: PlannerState,
    pub exit_state: PlannerState,
    pub sequ: Locator,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub parent: Option<usize>,
    pub key: f64,
    pub status: NodeStatus,
}

impl PathNode {
    pub fn child(&self, side: Side) -> Option<usize> {
        match side {
            Side::L => self.left,
            Side::R => self.right,
        }
    }

    pub fn vacant_sides(&self) -> Vec<Side> {
        [Side::L, Side::R]
            .into_iter()
            .filter(|&s| self.child(s).is_none())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub created: usize,
    pub pruned: usize,
    pub popped: usize,
}

/// Arena-backed binary tree plus its heuristic index.
#[derive(Debug, Clone)]
pub struct PathTree {
    nodes: Vec<PathNode>,
    index: HeuristicIndex,
    goal: Point25,
    stats: TreeStats,
}

impl PathTree {
    /// Creates the root from `start` and its leading segment.
    pub fn new(start: PlannerState, segment: CurvatureProfile, goal: Point25) -> Self {
        let exit = end_state(start, &segment);
        let key = exit.distance_xy(goal.x, goal.y);
        let root = PathNode {
            value: segment,
            entry_state: start,
            exit_state: exit,
            sequ: Locator::root(),
            left: None,
            right: None,
            parent: None,
            key,
            status: NodeStatus::Open,
        };
        let mut index = HeuristicIndex::new();
        index.push(key, Locator::root());
        Self {
            nodes: vec![root],
            index,
            goal,
            stats: TreeStats {
                created: 1,
                ..TreeStats::default()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn stats(&self) -> TreeStats {
        self.stats
    }

    pub fn index(&self) -> &HeuristicIndex {
        &self.index
    }

    pub fn nodes(&self) -> &[PathNode] {
        &self.nodes
    }

    pub fn resolve(&self, locator: &Locator) -> Result<usize> {
        let mut at = 0usize;
        for c in locator.as_str().chars() {
            let node = &self.nodes[at];
            let next = match c {
                'L' => node.left,
                'R' => node.right,
                _ => None,
            };
            at = next.ok_or_else(|| Error::UnknownLocator(locator.as_str().to_owned()))?;
        }
        Ok(at)
    }

    pub fn node(&self, locator: &Locator) -> Result<&PathNode> {
        self.resolve(locator).map(|i| &self.nodes[i])
    }

    /// Adds a child segment under `parent` and indexes it by its exit
    /// distance to the goal. The parent leaves the index once both of its
    /// children exist.
    pub fn insert(&mut self, parent: &Locator, side: Side, segment: CurvatureProfile) -> Result<Locator> {
        let p = self.resolve(parent)?;
        if self.nodes[p].child(side).is_some() {
            return Err(Error::SideOccupied {
                locator: parent.as_str().to_owned(),
                side: side.letter(),
            });
        }
        let entry = self.nodes[p].exit_state;
        let exit = end_state(entry, &segment);
        let key = exit.distance_xy(self.goal.x, self.goal.y);
        let locator = parent.child(side);
        let id = self.nodes.len();
        self.nodes.push(PathNode {
            value: segment,
            entry_state: entry,
            exit_state: exit,
            sequ: locator.clone(),
            left: None,
            right: None,
            parent: Some(p),
            key,
            status: NodeStatus::Open,
        });
        match side {
            Side::L => self.nodes[p].left = Some(id),
            Side::R => self.nodes[p].right = Some(id),
        }
        self.stats.created += 1;
        self.index.push(key, locator.clone());
        if self.nodes[p].left.is_some() && self.nodes[p].right.is_some() {
            self.index.remove(parent);
            self.nodes[p].status = NodeStatus::Expanded;
        }
        Ok(locator)
    }

    pub fn peek_min(&self) -> Result<(Locator, f64)> {
        self.index.peek_min().map(|(l, k)| (l.clone(), k))
    }

    pub fn pop_min(&mut self) -> Result<(Locator, f64)> {
        let (loc, key) = self.index.pop_min()?;
        let id = self.resolve(&loc)?;
        self.nodes[id].status = NodeStatus::Popped;
        self.stats.popped += 1;
        Ok((loc, key))
    }

    /// Closes a node for good.
    pub fn prune(&mut self, locator: &Locator) -> Result<()> {
        let id = self.resolve(locator)?;
        self.index.remove(locator);
        self.nodes[id].status = NodeStatus::Pruned;
        self.stats.pruned += 1;
        Ok(())
    }

    /// Concatenates segments along root to `leaf`.
    pub fn reconstruct(&self, leaf: &Locator) -> Result<CurvatureProfile> {
        let mut chain = Vec::with_capacity(leaf.depth() + 1);
        let mut at = Some(self.resolve(leaf)?);
        while let Some(i) = at {
            chain.push(i);
            at = self.nodes[i].parent;
        }
        let first = &self.nodes[chain[chain.len() - 1]].value;
        let mut out = CurvatureProfile::empty(first.dt, first.rho_max);
        for &i in chain.iter().rev() {
            out.extend(&self.nodes[i].value)?;
        }
        Ok(out)
    }

    /// Serializable snapshot for rendering.
    pub fn dump(&self) -> TreeDump {
        TreeDump {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDump {
                    locator: n.sequ.clone(),
                    entry: [n.entry_state.x, n.entry_state.y],
                    exit: [n.exit_state.x, n.exit_state.y],
                    trace: trace(n),
                    key: n.key,
                    status: n.status,
                })
                .collect(),
            stats: self.stats,
        }
    }
}

const TRACE_STRIDE: usize = 10;

fn trace(n: &PathNode) -> Vec<[f64; 2]> {
    match integrate(n.entry_state, &n.value) {
        Ok(w) => {
            let k = w.states.len();
            w.states
                .iter()
                .enumerate()
                .filter(|(i, _)| i % TRACE_STRIDE == 0 || i + 1 == k)
                .map(|(_, s)| [s.x, s.y])
                .collect()
        }
        Err(_) => vec![[n.entry_state.x, n.entry_state.y], [n.exit_state.x, n.exit_state.y]],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeDump {
    pub locator: Locator,
    pub entry: [f64; 2],
    pub exit: [f64; 2],
    /// Segment shape, sampled every `TRACE_STRIDE` steps plus the exit.
    pub trace: Vec<[f64; 2]>,
    pub key: f64,
    pub status: NodeStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeDump {
    pub nodes: Vec<NodeDump>,
    pub stats: TreeStats,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::inverse_integrate;

    fn seg(n: usize) -> CurvatureProfile {
        CurvatureProfile::straight(0.01, n, 0.4)
    }

    fn tree() -> PathTree {
        PathTree::new(PlannerState::new(0.0, 0.0, 0.0), seg(100), Point25::planar(10.0, 0.0))
    }

    #[test]
    fn insert_at_root_left() {
        let mut t = tree();
        t.pop_min().unwrap();
        let loc = t.insert(&Locator::root(), Side::L, seg(50)).unwrap();
        assert_eq!(loc.as_str(), "L");
        assert_eq!(t.index().len(), 1);
    }

    #[test]
    fn second_child_prunes_parent_entry() {
        let mut t = tree();
        t.insert(&Locator::root(), Side::L, seg(10)).unwrap();
        assert_eq!(t.index().len(), 2);
        t.insert(&Locator::root(), Side::R, seg(10)).unwrap();
        // parent removed, one child added: net unchanged
        assert_eq!(t.index().len(), 2);
        assert!(!t.index().contains(&Locator::root()));
        assert_eq!(t.node(&Locator::root()).unwrap().status, NodeStatus::Expanded);
    }

    #[test]
    fn missing_parent_and_occupied_side() {
        let mut t = tree();
        let bad = Locator::parse("LX");
        assert!(bad.is_err());
        let err = t.insert(&Locator::parse("L").unwrap(), Side::L, seg(1)).unwrap_err();
        assert!(matches!(err, Error::UnknownLocator(_)));
        t.insert(&Locator::root(), Side::L, seg(1)).unwrap();
        let err = t.insert(&Locator::root(), Side::L, seg(1)).unwrap_err();
        assert!(matches!(err, Error::SideOccupied { .. }));
    }

    #[test]
    fn pop_min_orders_by_key_then_fifo() {
        let mut idx = HeuristicIndex::new();
        idx.push(3.0, Locator::parse("L").unwrap());
        idx.push(1.5, Locator::parse("R").unwrap());
        assert_eq!(idx.pop_min().unwrap(), (Locator::parse("R").unwrap(), 1.5));

        let mut idx = HeuristicIndex::new();
        idx.push(2.0, Locator::parse("LL").unwrap());
        idx.push(2.0, Locator::parse("RR").unwrap());
        assert_eq!(idx.pop_min().unwrap().0.as_str(), "LL");
        assert_eq!(idx.pop_min().unwrap().0.as_str(), "RR");
        assert_eq!(idx.pop_min(), Err(Error::EmptyIndex));
    }

    #[test]
    fn reconstruct_concatenates_in_order() {
        let mut t = tree();
        let a = seg(100);
        let b = inverse_integrate(0.02, 0.4, 0.5, 0.01).unwrap();
        let c = inverse_integrate(-0.03, 0.4, 0.7, 0.01).unwrap();
        t.insert(&Locator::root(), Side::L, b.clone()).unwrap();
        let leaf = t.insert(&Locator::parse("L").unwrap(), Side::R, c.clone()).unwrap();
        let p = t.reconstruct(&leaf).unwrap();
        assert_eq!(p.len(), 220);
        let expect = [a.kappas, b.kappas, c.kappas].concat();
        assert_eq!(p.kappas, expect);
        assert!(p.max_curvature_jump() <= 0.4 * 0.01 + 1e-12);
        assert_eq!(t.reconstruct(&Locator::root()).unwrap().len(), 100);
        assert!(t.reconstruct(&Locator::parse("RR").unwrap()).is_err());
    }

    #[test]
    fn exit_state_matches_integration() {
        let mut t = tree();
        let s = inverse_integrate(0.2, 0.4, 2.0, 0.01).unwrap();
        let loc = t.insert(&Locator::root(), Side::L, s.clone()).unwrap();
        let n = t.node(&loc).unwrap();
        let w = integrate(n.entry_state, &s).unwrap();
        assert_eq!(*w.last(), n.exit_state);
        assert_eq!(n.entry_state, t.node(&Locator::root()).unwrap().exit_state);
    }
}

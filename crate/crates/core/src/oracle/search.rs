//! Exhaustive search over observations (or runs) up to a length bound,
//! evaluating the quantifier bodies of the definitions on subset
//! configurations. Runs with the same configuration are interchangeable, so
//! each configuration is expanded once, at its shortest depth.
//!
//! A `None` result only says that no counterexample of length at most the
//! bound exists.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use thiserror::Error;

use crate::automaton::{AnnotatedModel, Lfsa};
use crate::graph;
use crate::verify::PropertyKind;
use crate::witness::{Counterexample, OpacityVariant};

use super::{members, Bits, PropertyInstance};

/// Environment variable capping the number of configurations expanded.
pub const BUDGET_VAR: &str = "DESV_BUDGET";

const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the search bound must be at least 1")]
    ZeroBound,
    #[error("bounded search supports at most 64 states, the model has {0}")]
    TooLarge(usize),
    #[error("enumeration exceeds the budget of {0} configurations (raise {BUDGET_VAR})")]
    BudgetExceeded(usize),
    #[error("{0} requires a step bound k")]
    MissingK(PropertyKind),
}

/// The budget from `DESV_BUDGET`, or the built-in default.
pub fn default_budget() -> usize {
    std::env::var(BUDGET_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

pub fn bounded_definitional_search(
    model: &AnnotatedModel,
    instance: PropertyInstance,
    bound: usize,
) -> Result<Option<Counterexample>, SearchError> {
    bounded_definitional_search_with_budget(model, instance, bound, default_budget())
}

pub fn bounded_definitional_search_with_budget(
    model: &AnnotatedModel,
    instance: PropertyInstance,
    bound: usize,
    budget: usize,
) -> Result<Option<Counterexample>, SearchError> {
    if bound == 0 {
        return Err(SearchError::ZeroBound);
    }
    let m = &model.lfsa;
    let bits = Bits::new(m).ok_or(SearchError::TooLarge(m.num_states()))?;
    let mut s = Search {
        model,
        bits,
        bound,
        meter: Meter { used: 0, budget },
        every: vec![true; m.num_events()],
        normal: m.event_ids().map(|e| !model.faults.is_faulty(e)).collect(),
        secret: model.secrets.states().iter().fold(0, |acc, q| acc | 1 << q.0),
    };
    let name = instance.property.name();
    let found = match instance.property {
        PropertyKind::StarSd => s.detectability(false)?,
        PropertyKind::OmegaSd => s.detectability(true)?,
        PropertyKind::Diagnosability => s.diagnosability()?,
        PropertyKind::Predictability => s.predictability()?,
        PropertyKind::Opacity(v) => {
            let k = if v.needs_k() {
                Some(instance.k.ok_or(SearchError::MissingK(instance.property))?)
            } else {
                None
            };
            s.opacity(v, k)?
        }
    };
    Ok(found.map(|mut c| {
        c.property = name.to_string();
        c
    }))
}

struct Meter {
    used: usize,
    budget: usize,
}

impl Meter {
    fn tick(&mut self) -> Result<(), SearchError> {
        self.used += 1;
        if self.used > self.budget {
            Err(SearchError::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }
}

/// Breadth-first tree over configurations; moves are numbered by the caller.
struct Tree<C> {
    nodes: Vec<C>,
    index: HashMap<C, usize>,
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    edges: Vec<Vec<usize>>,
}

impl<C: Clone + Eq + Hash> Tree<C> {
    fn build(
        starts: Vec<C>,
        max_depth: usize,
        meter: &mut Meter,
        keep: impl Fn(&C) -> bool,
        mut succ: impl FnMut(&C) -> Vec<(usize, C)>,
    ) -> Result<Tree<C>, SearchError> {
        let mut t = Tree {
            nodes: Vec::new(),
            index: HashMap::new(),
            parent: Vec::new(),
            depth: Vec::new(),
            edges: Vec::new(),
        };
        let mut queue = VecDeque::new();
        for c in starts {
            if keep(&c) && !t.index.contains_key(&c) {
                let i = t.add(c, None, 0);
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            meter.tick()?;
            if t.depth[i] == max_depth {
                continue;
            }
            for (mv, c) in succ(&t.nodes[i].clone()) {
                if !keep(&c) {
                    continue;
                }
                let j = match t.index.get(&c) {
                    Some(&j) => j,
                    None => {
                        let j = t.add(c, Some((i, mv)), t.depth[i] + 1);
                        queue.push_back(j);
                        j
                    }
                };
                t.edges[i].push(j);
            }
        }
        Ok(t)
    }

    fn add(&mut self, c: C, parent: Option<(usize, usize)>, depth: usize) -> usize {
        let i = self.nodes.len();
        self.index.insert(c.clone(), i);
        self.nodes.push(c);
        self.parent.push(parent);
        self.depth.push(depth);
        self.edges.push(Vec::new());
        i
    }

    fn moves_to(&self, mut i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some((p, mv)) = self.parent[i] {
            out.push(mv);
            i = p;
        }
        out.reverse();
        out
    }
}

struct Search<'a> {
    model: &'a AnnotatedModel,
    bits: Bits,
    bound: usize,
    meter: Meter,
    every: Vec<bool>,
    normal: Vec<bool>,
    secret: u64,
}

impl Search<'_> {
    fn m(&self) -> &Lfsa {
        &self.model.lfsa
    }

    fn label_names(&self, moves: &[usize]) -> Vec<String> {
        moves.iter().map(|&a| self.m().outputs()[a].clone()).collect()
    }

    fn event_names(&self, moves: &[usize]) -> Vec<String> {
        moves
            .iter()
            .map(|&t| self.m().event_name(self.m().transitions()[t].event).to_string())
            .collect()
    }

    fn found(&self, sequence: Vec<String>, pump: Option<(usize, usize)>, split: Option<usize>, note: String) -> Counterexample {
        Counterexample {
            property: String::new(),
            sequence,
            pump,
            split,
            note,
        }
    }

    /// `|M(αγⁿβ)| > 1` for every `n`, where `γ` returns the estimate to itself.
    /// The infinite-run variant also needs a state of the estimate with an infinite future.
    fn detectability(&mut self, omega: bool) -> Result<Option<Counterexample>, SearchError> {
        let b = &self.bits;
        let infinite = {
            let mut w = b.all;
            loop {
                let next = members(w)
                    .filter(|&q| self.m().out(crate::automaton::StateId(q)).iter().any(|&(_, r)| w >> r.0 & 1 == 1))
                    .fold(0u64, |acc, q| acc | 1 << q);
                if next == w {
                    break w;
                }
                w = next;
            }
        };
        let bad = |x: &u64| x.count_ones() > 1 && (!omega || x & infinite != 0);
        let every = self.every.clone();
        let succ = |x: &u64| (0..b.labels).map(|a| (a, b.step(*x, a, &every, b.all))).collect::<Vec<_>>();
        let x0 = b.close(b.initial, &every, b.all);
        let outer = Tree::build(vec![x0], self.bound, &mut self.meter, |_| true, succ)?;
        for i in 0..outer.nodes.len() {
            let x = outer.nodes[i];
            let d = outer.depth[i];
            if d + 1 > self.bound {
                break;
            }
            let inner = Tree::build(vec![x], self.bound - d, &mut self.meter, |_| true, succ)?;
            let cycle = (0..inner.nodes.len())
                .flat_map(|j| (0..b.labels).map(move |a| (j, a)))
                .filter(|&(j, a)| b.step(inner.nodes[j], a, &every, b.all) == x)
                .min_by_key(|&(j, _)| inner.depth[j]);
            let Some((j, a)) = cycle else { continue };
            let c = inner.depth[j] + 1;
            let Some(g) = (0..inner.nodes.len()).filter(|&h| bad(&inner.nodes[h])).min_by_key(|&h| inner.depth[h]) else {
                continue;
            };
            if d + c + inner.depth[g] > self.bound {
                continue;
            }
            let mut seq = outer.moves_to(i);
            let mut gamma = inner.moves_to(j);
            gamma.push(a);
            seq.extend(&gamma);
            seq.extend(inner.moves_to(g));
            let end = inner.nodes[g];
            let note = format!(
                "repeating the segment keeps the estimate after it; the final estimate has {} states",
                end.count_ones()
            );
            return Ok(Some(self.found(self.label_names(&seq), Some((d, c)), None, note)));
        }
        Ok(None)
    }

    /// A run with a fault followed by a repeatable segment of events, all
    /// matched by fault-free runs with the same outputs.
    fn diagnosability(&mut self) -> Result<Option<Counterexample>, SearchError> {
        let m = self.model.lfsa.clone();
        let b = &self.bits;
        let faults = &self.model.faults;
        let normal = self.normal.clone();
        let n0 = b.close(b.initial, &normal, b.all);
        let starts = members(b.initial).map(|p| (p, false, n0)).collect();
        let succ = |&(p, flag, n): &(usize, bool, u64)| {
            m.transitions()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.from.0 == p)
                .map(|(i, t)| {
                    let n2 = match b.label[t.event.0] {
                        Some(a) => b.step(n, a, &normal, b.all),
                        None => n,
                    };
                    (i, (t.to.0, flag || faults.is_faulty(t.event), n2))
                })
                .collect::<Vec<_>>()
        };
        let tree = Tree::build(starts, self.bound, &mut self.meter, |c| c.2 != 0, succ)?;
        let comps = graph::tarjan(&tree.edges);
        let mut size = vec![0usize; comps.count];
        for &k in &comps.comp {
            size[k] += 1;
        }
        for i in 0..tree.nodes.len() {
            let (_, flag, _) = tree.nodes[i];
            let k = comps.comp[i];
            let self_loop = tree.edges[i].contains(&i);
            if !flag || !(size[k] > 1 || self_loop) {
                continue;
            }
            let d = tree.depth[i];
            let target = tree.nodes[i];
            let inner = Tree::build(vec![target], self.bound.saturating_sub(d + 1), &mut self.meter, |c| c.2 != 0, succ)?;
            let back = (0..inner.nodes.len())
                .flat_map(|j| succ(&inner.nodes[j]).into_iter().map(move |(mv, c)| (j, mv, c)))
                .filter(|(_, _, c)| *c == target)
                .min_by_key(|&(j, _, _)| inner.depth[j]);
            let Some((j, mv, _)) = back else { continue };
            let c = inner.depth[j] + 1;
            if d + c > self.bound {
                continue;
            }
            let mut seq = tree.moves_to(i);
            seq.extend(inner.moves_to(j));
            seq.push(mv);
            let note = "after the fault the segment can be repeated indefinitely while fault-free runs keep producing the same outputs".to_string();
            return Ok(Some(self.found(self.event_names(&seq), Some((d, c)), None, note)));
        }
        Ok(None)
    }

    /// A fault-free run to a state with a faulty exit, such that along the way
    /// every observed prefix is also produced by a fault-free run that can
    /// continue fault-free for more than `bound` events.
    fn predictability(&mut self) -> Result<Option<Counterexample>, SearchError> {
        let m = self.model.lfsa.clone();
        let b = &self.bits;
        let faults = &self.model.faults;
        let normal = self.normal.clone();
        let mut long = b.all;
        for _ in 0..=self.bound {
            let next = members(long)
                .filter(|&q| {
                    m.out(crate::automaton::StateId(q))
                        .iter()
                        .any(|&(e, r)| !faults.is_faulty(e) && long >> r.0 & 1 == 1)
                })
                .fold(0u64, |acc, q| acc | 1 << q);
            if next == long {
                break;
            }
            long = next;
        }
        let n0 = b.close(b.initial, &normal, b.all);
        let starts = members(b.initial).map(|p| (p, n0)).collect();
        let succ = |&(p, n): &(usize, u64)| {
            m.transitions()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.from.0 == p && !faults.is_faulty(t.event))
                .map(|(i, t)| {
                    let n2 = match b.label[t.event.0] {
                        Some(a) => b.step(n, a, &normal, b.all),
                        None => n,
                    };
                    (i, (t.to.0, n2))
                })
                .collect::<Vec<_>>()
        };
        let tree = Tree::build(
            starts,
            self.bound.saturating_sub(1),
            &mut self.meter,
            |c| c.1 & long != 0,
            succ,
        )?;
        for i in 0..tree.nodes.len() {
            let p = tree.nodes[i].0;
            let fault = m
                .transitions()
                .iter()
                .position(|t| t.from.0 == p && faults.is_faulty(t.event));
            if let Some(f) = fault {
                let mut seq = tree.moves_to(i);
                seq.push(f);
                let note = "every fault-free prefix is matched by fault-free runs with unbounded fault-free continuations".to_string();
                return Ok(Some(self.found(self.event_names(&seq), None, None, note)));
            }
        }
        Ok(None)
    }

    fn opacity(&mut self, v: OpacityVariant, k: Option<u64>) -> Result<Option<Counterexample>, SearchError> {
        use OpacityVariant::*;
        let every = self.every.clone();
        let b = &self.bits;
        let (s, all) = (self.secret, b.all);
        let open = all & !s;
        let close = |x: u64| b.close(x, &every, all);
        let step = |x: u64, a: usize| b.step(x, a, &every, all);
        let clean_close = |x: u64| b.close(x, &every, open);
        let clean_step = |x: u64, a: usize| b.step(x, a, &every, open);
        let q0 = b.initial;
        // The closures borrow `self.bits`; searches take a separate meter.
        let mut meter = Meter {
            used: self.meter.used,
            budget: self.meter.budget,
        };
        let bound = self.bound;
        let names = |moves: &[usize]| -> Vec<String> { moves.iter().map(|&a| self.m().outputs()[a].clone()).collect() };
        let simple = |meter: &mut Meter, start: (u64, u64), stepper: &dyn Fn(&(u64, u64), usize) -> (u64, u64), bad: &dyn Fn(&(u64, u64)) -> bool, note: &str| -> Result<Option<Counterexample>, SearchError> {
            let succ = |c: &(u64, u64)| (0..b.labels).map(|a| (a, stepper(c, a))).collect::<Vec<_>>();
            let tree = Tree::build(vec![start], bound, meter, |_| true, succ)?;
            Ok((0..tree.nodes.len()).find(|&i| bad(&tree.nodes[i])).map(|i| Counterexample {
                property: String::new(),
                sequence: names(&tree.moves_to(i)),
                pump: None,
                split: None,
                note: note.to_string(),
            }))
        };
        let result = match v {
            Cso => simple(
                &mut meter,
                (close(q0), 0),
                &|c, a| (step(c.0, a), 0),
                &|c| c.0 != 0 && c.0 & !s == 0,
                "every state consistent with the observation is secret",
            )?,
            Iso => simple(
                &mut meter,
                (close(q0 & s), close(q0 & !s)),
                &|c, a| (step(c.0, a), step(c.1, a)),
                &|c| c.0 != 0 && c.1 == 0,
                "only secret initial states are consistent with the observation",
            )?,
            Scso => simple(
                &mut meter,
                (close(q0), clean_close(q0)),
                &|c, a| (step(c.0, a), clean_step(c.1, a)),
                &|c| c.0 & s != 0 && c.1 == 0,
                "a run ends in a secret and no non-secret run produces the observation",
            )?,
            Siso => simple(
                &mut meter,
                (close(q0 & s), clean_close(q0)),
                &|c, a| (step(c.0, a), clean_step(c.1, a)),
                &|c| c.0 != 0 && c.1 == 0,
                "a run starts in a secret and no non-secret run produces the observation",
            )?,
            Sinfso => {
                // (visited, clean): states of runs that did / did not visit a secret.
                let unobs: Vec<usize> = (0..every.len()).filter(|&e| b.label[e].is_none()).collect();
                let settle = |(mut vis, mut cl): (u64, u64)| loop {
                    let mut nv = vis;
                    let mut nc = cl;
                    for &e in &unobs {
                        let from_clean = b.post(cl, e);
                        nv |= b.post(vis, e) | (from_clean & s);
                        nc |= from_clean & !s;
                    }
                    if (nv, nc) == (vis, cl) {
                        break (vis, cl);
                    }
                    vis = nv;
                    cl = nc;
                };
                let move_on = |&(vis, cl): &(u64, u64), a: usize| {
                    let mut nv = 0;
                    let mut nc = 0;
                    for e in (0..every.len()).filter(|&e| b.label[e] == Some(a)) {
                        let from_clean = b.post(cl, e);
                        nv |= b.post(vis, e) | (from_clean & s);
                        nc |= from_clean & !s;
                    }
                    settle((nv, nc))
                };
                simple(
                    &mut meter,
                    settle((q0 & s, q0 & !s)),
                    &move_on,
                    &|c| c.0 != 0 && c.1 == 0,
                    "a run visits a secret and no non-secret run produces the observation",
                )?
            }
            Infso | Kso => {
                let limit = k.map_or(bound, |k| usize::try_from(k).unwrap_or(usize::MAX).min(bound));
                let succ = |x: &u64| (0..b.labels).map(|a| (a, step(*x, a))).collect::<Vec<_>>();
                let outer = Tree::build(vec![close(q0)], bound, &mut meter, |_| true, succ)?;
                let mut seen = std::collections::HashSet::new();
                let mut hit = None;
                for i in 0..outer.nodes.len() {
                    let x = outer.nodes[i];
                    let seed = (close(x & s), close(x & !s));
                    if seed.0 == 0 || !seen.insert(seed) {
                        continue;
                    }
                    let d = outer.depth[i];
                    let psucc = |c: &(u64, u64)| (0..b.labels).map(|a| (a, (step(c.0, a), step(c.1, a)))).collect::<Vec<_>>();
                    let inner = Tree::build(vec![seed], limit.min(bound - d), &mut meter, |_| true, psucc)?;
                    if let Some(j) = (0..inner.nodes.len()).find(|&j| inner.nodes[j].0 != 0 && inner.nodes[j].1 == 0) {
                        let mut seq = outer.moves_to(i);
                        seq.extend(inner.moves_to(j));
                        hit = Some(Counterexample {
                            property: String::new(),
                            sequence: names(&seq),
                            pump: None,
                            split: Some(d),
                            note: "after the first `split` outputs only secret states are consistent with what follows".into(),
                        });
                        break;
                    }
                }
                hit
            }
            Skso => {
                let k = usize::try_from(k.expect("checked by caller")).unwrap_or(usize::MAX).min(bound);
                let far = u16::MAX;
                let n = b.n;
                let m = &self.model.lfsa;
                // (full estimate, per state the fewest outputs since a secret was last
                // visited, non-secret estimate); distances beyond K are dropped.
                type Cfg = (u64, Vec<u16>, u64);
                let relax = |x: u64, mut dist: Vec<u16>| {
                    for q in members(x & s) {
                        dist[q] = 0;
                    }
                    loop {
                        let mut changed = false;
                        for q in 0..n {
                            if dist[q] == far {
                                continue;
                            }
                            for &(e, r) in m.out(crate::automaton::StateId(q)) {
                                if b.label[e.0].is_none() && dist[q] < dist[r.0] {
                                    dist[r.0] = dist[q];
                                    changed = true;
                                }
                            }
                        }
                        if !changed {
                            return dist;
                        }
                    }
                };
                let move_on = |(x, dist, cl): &Cfg, a: usize| -> Cfg {
                    let x2 = step(*x, a);
                    let mut next = vec![far; n];
                    for q in (0..n).filter(|&q| dist[q] != far) {
                        for &(e, r) in m.out(crate::automaton::StateId(q)) {
                            if b.label[e.0] == Some(a) && (dist[q] as usize) < k {
                                next[r.0] = next[r.0].min(dist[q] + 1);
                            }
                        }
                    }
                    (x2, relax(x2, next), clean_step(*cl, a))
                };
                let x0 = close(q0);
                let start: Cfg = (x0, relax(x0, vec![far; n]), clean_close(q0));
                let succ = |c: &Cfg| (0..b.labels).map(|a| (a, move_on(c, a))).collect::<Vec<_>>();
                let tree = Tree::build(vec![start], bound, &mut meter, |_| true, succ)?;
                (0..tree.nodes.len())
                    .find(|&i| tree.nodes[i].1.iter().any(|&d| d != far) && tree.nodes[i].2 == 0)
                    .map(|i| {
                        let back = *tree.nodes[i].1.iter().min().unwrap() as usize;
                        let seq = names(&tree.moves_to(i));
                        Counterexample {
                            property: String::new(),
                            split: Some(seq.len() - back),
                            sequence: seq,
                            pump: None,
                            note: "a secret was visited at most K outputs ago and no non-secret run produces the observation".into(),
                        }
                    })
            }
        };
        self.meter.used = meter.used;
        Ok(result)
    }
}

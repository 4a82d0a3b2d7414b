//! Finite-level dynamics of a polynomial map on `Z/p^nZ`.
//!
//! The induced map at level `n` evaluates the polynomial and reduces mod
//! `p^n`. This module computes orbits, detects full cycles, decomposes the
//! functional graph into components, and exposes the brute-force minimality
//! oracle: the whole p-adic system is minimal exactly when the level-delta
//! quotient is a single full cycle.

use std::collections::HashMap;

use thiserror::Error;

use crate::arith::{modulus, ArithError, IntPoly, Level, Prime, ReducedPoly, Residue};

/// Hard bound on `p^n` for whole-space operations (orbits, cycle checks,
/// decompositions). Keeps the tabulation arrays in memory.
pub const MAX_SPACE: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{p}^{n} = {size} points exceeds the whole-space limit {max}")]
    SpaceTooLarge { p: u64, n: u32, size: u64, max: u64 },
    #[error("lift check requires a full cycle at level {level}")]
    PreconditionViolated { level: u32 },
}

/// The level at which minimality of the full p-adic system is decided:
/// 3 for p = 2 and p = 3, and 2 for every larger prime.
///
/// For p >= 7 the level-2 reduction is the only verdict this tool offers;
/// the closed-form criteria cover p = 2, 3, 5 only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelPolicy {
    p: Prime,
    delta: u32,
}

impl LevelPolicy {
    pub fn for_prime(p: Prime) -> Self {
        let delta = if p.value() <= 3 { 3 } else { 2 };
        LevelPolicy { p, delta }
    }

    pub fn prime(self) -> Prime {
        self.p
    }

    pub fn delta(self) -> u32 {
        self.delta
    }

    pub fn delta_level(self) -> Level {
        Level::new(self.delta).expect("delta is 2 or 3")
    }
}

/// The iterate sequence of a start point up to (not including) the first
/// repeat, together with the preperiod/period split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTrace {
    pub start: Residue,
    /// `f^0(start), f^1(start), ...`; exactly `preperiod + period` entries,
    /// all distinct. The next iterate equals `sequence[preperiod]`.
    pub sequence: Vec<Residue>,
    pub preperiod: usize,
    pub period: usize,
}

impl OrbitTrace {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// True when the orbit is one cycle through the whole space.
    pub fn is_full_cycle(&self) -> bool {
        self.preperiod == 0 && self.period as u64 == self.start.modulus()
    }

    pub fn values(&self) -> Vec<u64> {
        self.sequence.iter().map(|r| r.value()).collect()
    }
}

/// One weakly-connected component of the functional graph: its unique
/// cycle (in successor order, rotated so the smallest element leads) and
/// the tail points that fall into it, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub cycle: Vec<Residue>,
    pub tails: Vec<Residue>,
}

impl Component {
    pub fn size(&self) -> usize {
        self.cycle.len() + self.tails.len()
    }
}

/// Partition of `Z/p^nZ` into functional-graph components, sorted by the
/// smallest element on each cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub prime: Prime,
    pub level: Level,
    pub components: Vec<Component>,
}

impl CycleDecomposition {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// True when the graph is one cycle covering the whole space.
    pub fn is_single_full_cycle(&self) -> bool {
        self.components.len() == 1
            && self.components[0].tails.is_empty()
            && self.components[0].cycle.len() as u64
                == modulus(self.prime, self.level).expect("validated at construction")
    }
}

fn space_size(p: Prime, n: Level) -> Result<u64, DynamicsError> {
    let m = modulus(p, n)?;
    if m > MAX_SPACE {
        return Err(DynamicsError::SpaceTooLarge {
            p: p.value(),
            n: n.value(),
            size: m,
            max: MAX_SPACE,
        });
    }
    Ok(m)
}

/// Iterates `f` from `start` at the start's level until the first repeat.
pub fn orbit(f: &IntPoly, start: Residue) -> Result<OrbitTrace, DynamicsError> {
    let p = start.prime();
    let n = start.level();
    space_size(p, n)?;
    let reduced = ReducedPoly::new(f, p, n)?;

    let mut first_seen: HashMap<u64, usize> = HashMap::new();
    let mut sequence: Vec<Residue> = Vec::new();
    let mut x = start.value();
    loop {
        if let Some(&at) = first_seen.get(&x) {
            let preperiod = at;
            let period = sequence.len() - at;
            return Ok(OrbitTrace {
                start,
                sequence,
                preperiod,
                period,
            });
        }
        first_seen.insert(x, sequence.len());
        sequence.push(Residue::new(x, p, n).expect("iterates stay below the modulus"));
        x = reduced.eval(x);
    }
}

/// True exactly when the induced map at level `n` is one `p^n`-cycle.
///
/// Single pass from 0: visit `p^n` pairwise-distinct points and land back
/// on 0. Equivalent to minimality of the level-`n` quotient.
pub fn full_cycle_check(f: &IntPoly, p: Prime, n: Level) -> Result<bool, DynamicsError> {
    let m = space_size(p, n)?;
    let reduced = ReducedPoly::new(f, p, n)?;
    let mut visited = vec![false; m as usize];
    let mut x = 0u64;
    visited[0] = true;
    for _ in 1..m {
        x = reduced.eval(x);
        if visited[x as usize] {
            return Ok(false);
        }
        visited[x as usize] = true;
    }
    Ok(reduced.eval(x) == 0)
}

/// Decomposes the functional graph of the level-`n` map into components.
///
/// Iterative pointer-chasing with an explicit state array; no recursion,
/// so arbitrarily long tails cannot overflow the stack.
pub fn minimal_decomposition(
    f: &IntPoly,
    p: Prime,
    n: Level,
) -> Result<CycleDecomposition, DynamicsError> {
    let m = space_size(p, n)? as usize;
    let reduced = ReducedPoly::new(f, p, n)?;
    let succ: Vec<u32> = (0..m as u64).map(|x| reduced.eval(x) as u32).collect();

    const UNVISITED: u8 = 0;
    const IN_PROGRESS: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![UNVISITED; m];
    let mut comp_id = vec![u32::MAX; m];
    let mut on_cycle = vec![false; m];
    let mut cycle_starts: Vec<u32> = Vec::new();

    let mut path: Vec<u32> = Vec::new();
    for start in 0..m as u32 {
        if state[start as usize] != UNVISITED {
            continue;
        }
        path.clear();
        let mut x = start;
        while state[x as usize] == UNVISITED {
            state[x as usize] = IN_PROGRESS;
            path.push(x);
            x = succ[x as usize];
        }
        let id = if state[x as usize] == IN_PROGRESS {
            // The walk closed on itself: everything from the first
            // occurrence of x onward is a new cycle.
            let id = cycle_starts.len() as u32;
            cycle_starts.push(x);
            let cycle_from = path.iter().position(|&v| v == x).expect("x is on the path");
            for &v in &path[cycle_from..] {
                on_cycle[v as usize] = true;
            }
            id
        } else {
            comp_id[x as usize]
        };
        for &v in &path {
            state[v as usize] = DONE;
            comp_id[v as usize] = id;
        }
    }

    let mut components: Vec<Component> = Vec::with_capacity(cycle_starts.len());
    let mut min_cycle_elem = vec![u32::MAX; cycle_starts.len()];
    for v in 0..m as u32 {
        if on_cycle[v as usize] {
            let id = comp_id[v as usize] as usize;
            min_cycle_elem[id] = min_cycle_elem[id].min(v);
        }
    }

    let mut order: Vec<usize> = (0..cycle_starts.len()).collect();
    order.sort_by_key(|&id| min_cycle_elem[id]);

    let mk = |v: u32| Residue::new(v as u64, p, n).expect("values below the modulus");
    for &id in &order {
        // Walk the cycle in successor order from its smallest element.
        let first = min_cycle_elem[id];
        let mut cycle = vec![mk(first)];
        let mut x = succ[first as usize];
        while x != first {
            cycle.push(mk(x));
            x = succ[x as usize];
        }
        components.push(Component {
            cycle,
            tails: Vec::new(),
        });
    }
    let mut position_of = vec![usize::MAX; cycle_starts.len()];
    for (pos, &id) in order.iter().enumerate() {
        position_of[id] = pos;
    }
    for v in 0..m as u32 {
        if !on_cycle[v as usize] {
            components[position_of[comp_id[v as usize] as usize]]
                .tails
                .push(mk(v));
        }
    }

    Ok(CycleDecomposition {
        prime: p,
        level: n,
        components,
    })
}

/// Ground-truth minimality of the p-adic system: full cycle at the
/// decisive level from [`LevelPolicy`].
pub fn oracle_minimal(f: &IntPoly, p: Prime) -> Result<bool, DynamicsError> {
    full_cycle_check(f, p, LevelPolicy::for_prime(p).delta_level())
}

/// Given a full cycle at level `n`, decides whether the cycle lifts to
/// level `n + 1` by testing at the point 0:
/// `f^{p^n}(0) != 0 (mod p^{n+1})` and the chain-rule derivative product
/// `prod_{i < p^n} f'(f^i(0)) = 1 (mod p)`.
pub fn lift_check(f: &IntPoly, p: Prime, n: Level) -> Result<bool, DynamicsError> {
    if !full_cycle_check(f, p, n)? {
        return Err(DynamicsError::PreconditionViolated { level: n.value() });
    }
    let steps = modulus(p, n)?;
    let up = Level::new(n.value() + 1).expect("positive");
    space_size(p, up)?;
    let f_up = ReducedPoly::new(f, p, up)?;
    let deriv_mod_p =
        ReducedPoly::new(&crate::arith::poly_derivative(f), p, Level::new(1).unwrap())?;
    let pv = p.value();

    let mut x = 0u64;
    let mut deriv_product = 1u64;
    for _ in 0..steps {
        deriv_product = (deriv_product * deriv_mod_p.eval(x % pv)) % pv;
        x = f_up.eval(x);
    }
    Ok(x != 0 && deriv_product == 1)
}

//! Deterministic execution and exhaustive nondeterministic exploration.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::machine::{validate, Action, Machine, StateId, SymbolId};

/// A single classical configuration. Blank cells are never stored, so two
/// configurations are equal exactly when they describe the same machine
/// situation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassicalConfig {
    pub state: StateId,
    pub position: i64,
    pub tape: BTreeMap<i64, SymbolId>,
}

impl ClassicalConfig {
    /// Input on cells `0..len`, head at the machine's start position.
    pub fn initial(machine: &Machine, input: &[SymbolId]) -> Self {
        let mut c =
            ClassicalConfig { state: machine.start_state(), position: machine.start_position(), tape: BTreeMap::new() };
        for (k, &s) in input.iter().enumerate() {
            c.set(k as i64, s, machine.blank());
        }
        c
    }

    pub fn read(&self, pos: i64, blank: SymbolId) -> SymbolId {
        self.tape.get(&pos).copied().unwrap_or(blank)
    }

    pub fn set(&mut self, pos: i64, sym: SymbolId, blank: SymbolId) {
        if sym == blank {
            self.tape.remove(&pos);
        } else {
            self.tape.insert(pos, sym);
        }
    }

    pub fn scanned(&self, machine: &Machine) -> SymbolId {
        self.read(self.position, machine.blank())
    }

    /// Indices of instructions whose head pair matches, marks ignored.
    pub fn matching<'m>(&self, machine: &'m Machine) -> &'m [usize] {
        machine.matching(self.state, self.scanned(machine))
    }

    /// The configuration reached by executing instruction `k`. The caller is
    /// responsible for `k` being applicable.
    pub fn apply(&self, machine: &Machine, k: usize) -> ClassicalConfig {
        let inst = &machine.instructions()[k];
        let mut next = self.clone();
        if let Action::Write(s) = inst.action {
            next.set(self.position, s, machine.blank());
        }
        next.position = inst.target(self.position);
        next.state = inst.next_state;
        next
    }

    /// Leftmost and rightmost interesting cell (head or stored symbol).
    pub fn span(&self) -> (i64, i64) {
        let lo = self.tape.keys().next().copied().unwrap_or(self.position).min(self.position);
        let hi = self.tape.keys().next_back().copied().unwrap_or(self.position).max(self.position);
        (lo, hi)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassicalError {
    #[error("machine is not deterministic: {0}")]
    Nondeterministic(String),
    #[error("inconsistency marks have no classical meaning (instruction i{0})")]
    Marks(usize),
}

/// A classical run. `configs[t]` is the configuration at time `t` and
/// `fired[t]` the instruction (0-based) executed from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub configs: Vec<ClassicalConfig>,
    pub fired: Vec<usize>,
    pub halted: bool,
    pub truncated: bool,
}

impl Trace {
    pub fn last(&self) -> &ClassicalConfig {
        self.configs.last().expect("trace holds the initial configuration")
    }

    pub fn steps(&self) -> usize {
        self.fired.len()
    }
}

fn check_deterministic(machine: &Machine) -> Result<(), ClassicalError> {
    let report = validate(machine);
    if report.deterministic {
        return Ok(());
    }
    if let Some(g) = report.ambiguous_groups.first() {
        let names: Vec<String> = g.iter().map(|k| format!("i{}", k + 1)).collect();
        return Err(ClassicalError::Nondeterministic(format!(
            "instructions {} share their head pair",
            names.join(", ")
        )));
    }
    let k = machine.instructions().iter().position(|i| i.has_marks()).unwrap_or(0);
    Err(ClassicalError::Marks(k + 1))
}

fn check_unmarked(machine: &Machine) -> Result<(), ClassicalError> {
    match machine.instructions().iter().position(|i| i.has_marks()) {
        Some(k) => Err(ClassicalError::Marks(k + 1)),
        None => Ok(()),
    }
}

/// Runs a deterministic machine on `input` for at most `max_steps` steps.
pub fn dtm_run(machine: &Machine, input: &[SymbolId], max_steps: usize) -> Result<Trace, ClassicalError> {
    dtm_run_from(machine, ClassicalConfig::initial(machine, input), max_steps)
}

/// Like [`dtm_run`] but from an arbitrary starting configuration.
pub fn dtm_run_from(machine: &Machine, start: ClassicalConfig, max_steps: usize) -> Result<Trace, ClassicalError> {
    check_deterministic(machine)?;
    Ok(run_unchecked(machine, start, max_steps))
}

pub(crate) fn run_unchecked(machine: &Machine, start: ClassicalConfig, max_steps: usize) -> Trace {
    let mut configs = vec![start];
    let mut fired = Vec::new();
    loop {
        let cur = configs.last().expect("non-empty");
        let next = cur.matching(machine).first().copied();
        match next {
            None => {
                return Trace { configs, fired, halted: true, truncated: false };
            }
            Some(_) if fired.len() == max_steps => {
                return Trace { configs, fired, halted: false, truncated: true };
            }
            Some(k) => {
                let n = cur.apply(machine, k);
                configs.push(n);
                fired.push(k);
            }
        }
    }
}

/// A node of a computation tree stored in [`ComputationTree::nodes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub config: ClassicalConfig,
    pub depth: usize,
    /// `(instruction, child node index)` in instruction declaration order.
    pub branches: Vec<(usize, usize)>,
    /// Some instruction applies here but the step budget ran out.
    pub cut: bool,
}

impl TreeNode {
    pub fn is_halted(&self) -> bool {
        self.branches.is_empty() && !self.cut
    }
}

/// All runs of a nondeterministic machine. Node 0 is the root; children
/// always have larger indices than their parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputationTree {
    pub nodes: Vec<TreeNode>,
    pub truncated: bool,
}

impl ComputationTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Halted leaf configurations, left to right.
    pub fn leaves(&self) -> Vec<&ClassicalConfig> {
        let mut out = Vec::new();
        self.visit(|n| {
            if n.is_halted() {
                out.push(&n.config);
            }
        });
        out
    }

    /// Configurations at exactly depth `t`, left to right.
    pub fn level(&self, t: usize) -> Vec<&ClassicalConfig> {
        let mut out = Vec::new();
        self.visit(|n| {
            if n.depth == t {
                out.push(&n.config);
            }
        });
        out
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Pre-order traversal following branch order.
    fn visit<'a>(&'a self, mut f: impl FnMut(&'a TreeNode)) {
        let mut stack = vec![0usize];
        while let Some(k) = stack.pop() {
            let n = &self.nodes[k];
            f(n);
            stack.extend(n.branches.iter().rev().map(|(_, c)| *c));
        }
    }
}

/// Explores every run of a mark-free machine up to `max_steps` steps.
pub fn ndtm_run_all(
    machine: &Machine,
    input: &[SymbolId],
    max_steps: usize,
) -> Result<ComputationTree, ClassicalError> {
    check_unmarked(machine)?;
    let root =
        TreeNode { config: ClassicalConfig::initial(machine, input), depth: 0, branches: Vec::new(), cut: false };
    let mut nodes = vec![root];
    let mut truncated = false;
    let mut k = 0;
    while k < nodes.len() {
        let applicable = nodes[k].config.matching(machine);
        if !applicable.is_empty() {
            if nodes[k].depth == max_steps {
                nodes[k].cut = true;
                truncated = true;
            } else {
                for &i in applicable {
                    let child = TreeNode {
                        config: nodes[k].config.apply(machine, i),
                        depth: nodes[k].depth + 1,
                        branches: Vec::new(),
                        cut: false,
                    };
                    nodes.push(child);
                    let c = nodes.len() - 1;
                    nodes[k].branches.push((i, c));
                }
            }
        }
        k += 1;
    }
    Ok(ComputationTree { nodes, truncated })
}

//! Per-scenario transshipment profit maximization.
//!
//! After demand is observed, every location holds either a surplus or a
//! shortage. Moving one unit from `i` to `j` saves `h_i + p_j` and costs
//! `tau_ij`, so the best recourse is the transportation LP
//!
//! ```text
//! max  sum_ij profit_ij * T_ij
//! s.t. sum_j T_ij <= surplus_i,  sum_i T_ij <= shortage_j,  T >= 0
//! ```
//!
//! [`solve_transshipment`] runs a network simplex on the bipartite
//! surplus/shortage graph. Slack capacity is absorbed by a dummy sink (unsold
//! surplus) and a dummy source (unmet shortage), which makes the problem
//! balanced and gives an all-slack starting basis. Pivots follow Bland's rule.
//!
//! [`brute_force_transshipment`] is an independent oracle that enumerates
//! every spanning tree of the same augmented graph.

use ndarray::Array2;
use thiserror::Error;

use crate::num::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransshipError {
    #[error("profit matrix is {rows}x{cols} but surplus has {surplus} and shortage has {shortage} entries")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        surplus: usize,
        shortage: usize,
    },
    #[error("{what}[{index}] is negative")]
    NegativeCapacity { what: &'static str, index: usize },
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },
    #[error("brute-force oracle supports at most {max} locations per side, got {got}")]
    OracleTooLarge { max: usize, got: usize },
    #[error("simplex did not terminate after {0} pivots")]
    PivotLimit(usize),
}

/// Nonnegative shipment matrix together with its income.
#[derive(Debug, Clone, PartialEq)]
pub struct TransshipmentPlan<T> {
    /// `quantities[[i, j]]` units sent from location `i` to location `j`.
    pub quantities: Array2<T>,
    /// Total income `sum profit_ij * T_ij`.
    pub objective_value: T,
}

impl<T: Scalar> TransshipmentPlan<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            quantities: Array2::from_elem((rows, cols), T::zero()),
            objective_value: T::zero(),
        }
    }

    /// Total units received by location `j`.
    pub fn inbound(&self, j: usize) -> T {
        self.quantities
            .column(j)
            .iter()
            .fold(T::zero(), |acc, q| acc + q.clone())
    }

    /// Total units sent by location `i`.
    pub fn outbound(&self, i: usize) -> T {
        self.quantities.row(i).iter().fold(T::zero(), |acc, q| acc + q.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.quantities.iter().all(|q| q.is_zero())
    }
}

fn plan_income<T: Scalar>(profit: &Array2<T>, quantities: &Array2<T>) -> T {
    profit
        .iter()
        .zip(quantities.iter())
        .filter(|(_, q)| !q.is_zero())
        .fold(T::zero(), |acc, (c, q)| acc + c.clone() * q.clone())
}

fn validate_inputs<T: Scalar>(profit: &Array2<T>, surplus: &[T], shortage: &[T]) -> Result<(), TransshipError> {
    let (rows, cols) = profit.dim();
    if rows != surplus.len() || cols != shortage.len() {
        return Err(TransshipError::DimensionMismatch {
            rows,
            cols,
            surplus: surplus.len(),
            shortage: shortage.len(),
        });
    }
    if !profit.iter().all(Scalar::is_finite_value) {
        return Err(TransshipError::NonFinite { what: "profit" });
    }
    for (what, values) in [("surplus", surplus), ("shortage", shortage)] {
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite_value() {
                return Err(TransshipError::NonFinite { what });
            }
            if v.is_negative() {
                return Err(TransshipError::NegativeCapacity { what, index });
            }
        }
    }
    Ok(())
}

/// Bipartite graph with active senders, active receivers, and the two
/// slack nodes. Source nodes are `0..sources` (the dummy source is last),
/// sink nodes are `sources..sources + sinks` (the dummy sink is last).
struct AugmentedGraph<T> {
    senders: Vec<usize>,
    receivers: Vec<usize>,
    edges: Vec<Edge<T>>,
    supply: Vec<T>,
    demand: Vec<T>,
}

#[derive(Debug, Clone)]
struct Edge<T> {
    source: usize,
    sink: usize,
    /// Income per unit; zero on slack edges.
    profit: T,
    /// Original `(i, j)` for real routes.
    route: Option<(usize, usize)>,
}

impl<T: Scalar> AugmentedGraph<T> {
    fn new(profit: &Array2<T>, surplus: &[T], shortage: &[T], keep_route: impl Fn(&T) -> bool) -> Self {
        let senders: Vec<usize> = (0..surplus.len()).filter(|&i| surplus[i].is_positive()).collect();
        let receivers: Vec<usize> = (0..shortage.len()).filter(|&j| shortage[j].is_positive()).collect();
        let ns = senders.len() + 1;
        let nt = receivers.len() + 1;
        let dummy_source = ns - 1;
        let dummy_sink = nt - 1;

        let mut edges = Vec::new();
        for (a, &i) in senders.iter().enumerate() {
            for (b, &j) in receivers.iter().enumerate() {
                let c = profit[[i, j]].clone();
                if keep_route(&c) {
                    edges.push(Edge {
                        source: a,
                        sink: b,
                        profit: c,
                        route: Some((i, j)),
                    });
                }
            }
        }
        for a in 0..senders.len() {
            edges.push(Edge {
                source: a,
                sink: dummy_sink,
                profit: T::zero(),
                route: None,
            });
        }
        for b in 0..receivers.len() {
            edges.push(Edge {
                source: dummy_source,
                sink: b,
                profit: T::zero(),
                route: None,
            });
        }
        edges.push(Edge {
            source: dummy_source,
            sink: dummy_sink,
            profit: T::zero(),
            route: None,
        });

        let total_short = receivers.iter().fold(T::zero(), |acc, &j| acc + shortage[j].clone());
        let total_surplus = senders.iter().fold(T::zero(), |acc, &i| acc + surplus[i].clone());
        let mut supply: Vec<T> = senders.iter().map(|&i| surplus[i].clone()).collect();
        supply.push(total_short);
        let mut demand: Vec<T> = receivers.iter().map(|&j| shortage[j].clone()).collect();
        demand.push(total_surplus);

        Self {
            senders,
            receivers,
            edges,
            supply,
            demand,
        }
    }

    fn sources(&self) -> usize {
        self.senders.len() + 1
    }

    fn sinks(&self) -> usize {
        self.receivers.len() + 1
    }

    fn node_count(&self) -> usize {
        self.sources() + self.sinks()
    }

    fn sink_node(&self, b: usize) -> usize {
        self.sources() + b
    }

    fn to_plan(&self, profit: &Array2<T>, flow: &[T]) -> TransshipmentPlan<T> {
        let mut quantities = Array2::from_elem(profit.dim(), T::zero());
        for (e, f) in self.edges.iter().zip(flow) {
            if let Some((i, j)) = e.route {
                quantities[[i, j]] = f.clone();
            }
        }
        let objective_value = plan_income(profit, &quantities);
        TransshipmentPlan {
            quantities,
            objective_value,
        }
    }
}

/// Solve the transshipment LP exactly.
///
/// Routes with `profit <= 0` are dropped before solving; an optimal plan that
/// ships nothing on them always exists. Returned plans are deterministic for
/// given inputs.
pub fn solve_transshipment<T: Scalar>(
    profit: &Array2<T>,
    surplus: &[T],
    shortage: &[T],
) -> Result<TransshipmentPlan<T>, TransshipError> {
    validate_inputs(profit, surplus, shortage)?;
    let graph = AugmentedGraph::new(profit, surplus, shortage, |c| c.is_positive());
    let real_edges = graph.edges.iter().filter(|e| e.route.is_some()).count();
    if real_edges == 0 {
        let (r, c) = profit.dim();
        return Ok(TransshipmentPlan::zero(r, c));
    }

    let ns = graph.sources();
    let nt = graph.sinks();
    let dummy_source = ns - 1;
    let dummy_sink = nt - 1;

    // All-slack starting basis: every sender drains into the dummy sink and
    // the dummy source covers every shortage.
    let mut flow: Vec<T> = Vec::with_capacity(graph.edges.len());
    let mut basic: Vec<bool> = Vec::with_capacity(graph.edges.len());
    for e in &graph.edges {
        if e.route.is_some() {
            flow.push(T::zero());
            basic.push(false);
        } else if e.source != dummy_source {
            flow.push(graph.supply[e.source].clone());
            basic.push(true);
        } else if e.sink != dummy_sink {
            flow.push(graph.demand[e.sink].clone());
            basic.push(true);
        } else {
            flow.push(T::zero());
            basic.push(true);
        }
    }

    let tolerance = T::pivot_tolerance();
    let pivot_limit = 1000 * graph.edges.len().max(1) * graph.node_count();
    let nodes = graph.node_count();

    for _ in 0..pivot_limit {
        let adjacency = tree_adjacency(&graph, &basic);
        let (u, v) = potentials(&graph, &adjacency, dummy_source);

        // Bland: first non-basic edge with negative reduced cost (costs are -profit).
        let entering = graph.edges.iter().enumerate().position(|(idx, e)| {
            if basic[idx] {
                return false;
            }
            let reduced = -e.profit.clone() - u[e.source].clone() - v[e.sink].clone();
            reduced < -tolerance.clone()
        });
        let Some(entering) = entering else {
            return Ok(graph.to_plan(profit, &flow));
        };

        let e = &graph.edges[entering];
        let path = tree_path(&graph, &adjacency, graph.sink_node(e.sink), e.source, nodes);
        // Path edges alternate starting with a decrease at the entering sink.
        let decreasing: Vec<usize> = path.iter().step_by(2).copied().collect();
        let increasing: Vec<usize> = path.iter().skip(1).step_by(2).copied().collect();

        let theta = decreasing
            .iter()
            .map(|&idx| flow[idx].clone())
            .reduce(T::min_of)
            .expect("a tree path between a sink and a source is nonempty");
        let leaving = *decreasing
            .iter()
            .filter(|&&idx| flow[idx] == theta)
            .min()
            .expect("the minimum is attained");

        flow[entering] = flow[entering].clone() + theta.clone();
        for &idx in &increasing {
            flow[idx] = flow[idx].clone() + theta.clone();
        }
        for &idx in &decreasing {
            flow[idx] = flow[idx].clone() - theta.clone();
        }
        flow[leaving] = T::zero();
        basic[entering] = true;
        basic[leaving] = false;
    }
    Err(TransshipError::PivotLimit(pivot_limit))
}

/// Per node: `(neighbor node, edge index)` over basic edges.
fn tree_adjacency<T>(graph: &AugmentedGraph<T>, basic: &[bool]) -> Vec<Vec<(usize, usize)>>
where
    T: Scalar,
{
    let mut adjacency = vec![Vec::new(); graph.node_count()];
    for (idx, e) in graph.edges.iter().enumerate() {
        if basic[idx] {
            let t = graph.sink_node(e.sink);
            adjacency[e.source].push((t, idx));
            adjacency[t].push((e.source, idx));
        }
    }
    adjacency
}

/// Dual values with `u[root] = 0` and `u_a + v_b = -profit_ab` on basic edges.
fn potentials<T: Scalar>(
    graph: &AugmentedGraph<T>,
    adjacency: &[Vec<(usize, usize)>],
    root: usize,
) -> (Vec<T>, Vec<T>) {
    let ns = graph.sources();
    let mut value: Vec<Option<T>> = vec![None; graph.node_count()];
    value[root] = Some(T::zero());
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let known = value[node].clone().expect("visited nodes carry a potential");
        for &(next, idx) in &adjacency[node] {
            if value[next].is_none() {
                let cost = -graph.edges[idx].profit.clone();
                value[next] = Some(cost - known.clone());
                stack.push(next);
            }
        }
    }
    let mut all: Vec<T> = value
        .into_iter()
        .map(|v| v.expect("basis is a spanning tree"))
        .collect();
    let v = all.split_off(ns);
    (all, v)
}

/// Edge indices on the unique tree path from `from` to `to`, in walking order.
fn tree_path<T>(
    _graph: &AugmentedGraph<T>,
    adjacency: &[Vec<(usize, usize)>],
    from: usize,
    to: usize,
    nodes: usize,
) -> Vec<usize> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nodes];
    let mut seen = vec![false; nodes];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(node) = stack.pop() {
        if node == to {
            break;
        }
        for &(next, idx) in &adjacency[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, idx));
                stack.push(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = to;
    while node != from {
        let (prev, idx) = parent[node].expect("basis is a spanning tree");
        path.push(idx);
        node = prev;
    }
    path.reverse();
    path
}

/// Largest side the brute-force oracle accepts.
pub const ORACLE_MAX_SIDE: usize = 4;

/// Reference solver: best basic feasible solution over every spanning tree of
/// the augmented surplus/shortage graph.
///
/// Unlike [`solve_transshipment`] this keeps unprofitable routes and uses no
/// pivoting, so the two share nothing but the problem statement.
pub fn brute_force_transshipment<T: Scalar>(
    profit: &Array2<T>,
    surplus: &[T],
    shortage: &[T],
) -> Result<TransshipmentPlan<T>, TransshipError> {
    let side = surplus.len().max(shortage.len());
    if side > ORACLE_MAX_SIDE {
        return Err(TransshipError::OracleTooLarge {
            max: ORACLE_MAX_SIDE,
            got: side,
        });
    }
    validate_inputs(profit, surplus, shortage)?;
    let graph = AugmentedGraph::new(profit, surplus, shortage, |_| true);
    let tree_size = graph.node_count() - 1;

    let mut best: Option<(T, Vec<T>)> = None;
    let mut chosen = Vec::with_capacity(tree_size);
    enumerate_trees(&graph, 0, tree_size, &mut chosen, &mut |tree| {
        let Some(flow) = tree_flows(&graph, tree) else {
            return;
        };
        let income = tree.iter().zip(&flow).fold(T::zero(), |acc, (&idx, f)| {
            acc + graph.edges[idx].profit.clone() * f.clone()
        });
        if best.as_ref().is_none_or(|(b, _)| income > *b) {
            let mut full = vec![T::zero(); graph.edges.len()];
            for (&idx, f) in tree.iter().zip(flow) {
                full[idx] = f;
            }
            best = Some((income, full));
        }
    });

    let (_, flow) = best.expect("the all-slack tree is always feasible");
    Ok(graph.to_plan(profit, &flow))
}

fn enumerate_trees<T: Scalar>(
    graph: &AugmentedGraph<T>,
    start: usize,
    tree_size: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if chosen.len() == tree_size {
        visit(chosen);
        return;
    }
    let remaining = tree_size - chosen.len();
    for idx in start..graph.edges.len() {
        if graph.edges.len() - idx < remaining {
            break;
        }
        chosen.push(idx);
        if is_forest(graph, chosen) {
            enumerate_trees(graph, idx + 1, tree_size, chosen, visit);
        }
        chosen.pop();
    }
}

fn is_forest<T: Scalar>(graph: &AugmentedGraph<T>, edges: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..graph.node_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &idx in edges {
        let e = &graph.edges[idx];
        let a = find(&mut parent, e.source);
        let b = find(&mut parent, graph.sink_node(e.sink));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Flows on a spanning tree by leaf elimination, or `None` if any is negative.
fn tree_flows<T: Scalar>(graph: &AugmentedGraph<T>, tree: &[usize]) -> Option<Vec<T>> {
    let ns = graph.sources();
    let nodes = graph.node_count();
    // Net amount each node still has to push (sources) or pull (sinks).
    let mut residual: Vec<T> = graph
        .supply
        .iter()
        .cloned()
        .chain(graph.demand.iter().cloned())
        .collect();
    let mut degree = vec![0usize; nodes];
    for &idx in tree {
        let e = &graph.edges[idx];
        degree[e.source] += 1;
        degree[ns + e.sink] += 1;
    }
    let mut flow: Vec<Option<T>> = vec![None; tree.len()];
    let tolerance = T::feasibility_tolerance();
    for _ in 0..tree.len() {
        let (slot, leaf) = tree.iter().enumerate().find_map(|(slot, &idx)| {
            if flow[slot].is_some() {
                return None;
            }
            let e = &graph.edges[idx];
            let t = ns + e.sink;
            if degree[e.source] == 1 {
                Some((slot, e.source))
            } else if degree[t] == 1 {
                Some((slot, t))
            } else {
                None
            }
        })?;
        let e = &graph.edges[tree[slot]];
        let other = if leaf == e.source { ns + e.sink } else { e.source };
        let f = residual[leaf].clone();
        if f < -tolerance.clone() {
            return None;
        }
        residual[other] = residual[other].clone() - f.clone();
        residual[leaf] = T::zero();
        degree[leaf] -= 1;
        degree[other] -= 1;
        flow[slot] = Some(f);
    }
    Some(
        flow.into_iter()
            .map(|f| f.expect("every tree edge is peeled"))
            .collect(),
    )
}

/// True iff `plan` satisfies nonnegativity and both capacity families within
/// the scalar's feasibility tolerance.
pub fn check_feasible<T: Scalar>(plan: &TransshipmentPlan<T>, surplus: &[T], shortage: &[T]) -> bool {
    let (rows, cols) = plan.quantities.dim();
    if rows != surplus.len() || cols != shortage.len() {
        return false;
    }
    let tol = T::feasibility_tolerance();
    if plan.quantities.iter().any(|q| *q < -tol.clone()) {
        return false;
    }
    let rows_ok = (0..rows).all(|i| plan.outbound(i) <= surplus[i].clone() + tol.clone());
    let cols_ok = (0..cols).all(|j| plan.inbound(j) <= shortage[j].clone() + tol.clone());
    rows_ok && cols_ok
}

//! Problem instances, solutions and the four objective functions.
//!
//! Travel time, distance and cost between two vertices are the same number:
//! the unrounded Euclidean distance between their coordinates. Vehicles leave
//! the depot at the start of the planning horizon and serve each customer on
//! arrival; arriving before a window opens is never absorbed by waiting but
//! counted as a violation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::InstanceSpec;

/// Customer identifier, `1..=N`. Vertex `0` is the depot.
pub type CustomerId = usize;

/// A route is the ordered list of customers one vehicle visits.
pub type Route = Vec<CustomerId>;

#[derive(Debug, Clone, PartialEq)]
pub struct Depot {
    pub x: f64,
    pub y: f64,
    /// Earliest departure, `a0`.
    pub horizon_start: f64,
    /// Latest return, `b0`.
    pub horizon_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Customer {
    pub id: CustomerId,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub unload: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub has_window: bool,
}

impl Customer {
    /// Window violation `w` for a given arrival time and the violation flag.
    pub fn window_violation(&self, arrival: f64) -> (f64, u32) {
        window_violation(self.window_lo, self.window_hi, arrival)
    }
}

/// `w = max(max(0, lo - t), max(0, t - hi))`, flagged when `w > 0`.
pub fn window_violation(window_lo: f64, window_hi: f64, arrival: f64) -> (f64, u32) {
    let early = (window_lo - arrival).max(0.0);
    let late = (arrival - window_hi).max(0.0);
    let w = early.max(late);
    (w, u32::from(w > 0.0))
}

/// An immutable problem instance with a precomputed distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    class: InstanceSpec,
    capacity: f64,
    depot: Depot,
    customers: Vec<Customer>,
    dist: Vec<f64>,
}

impl Instance {
    /// Builds an instance, checking the structural invariants.
    ///
    /// Customers must be listed with ids `1..=N` in order, every demand must
    /// fit in one vehicle and every window must satisfy `lo <= hi`. Customers
    /// without a window must carry the depot horizon.
    pub fn new(
        name: impl Into<String>,
        class: InstanceSpec,
        capacity: f64,
        depot: Depot,
        customers: Vec<Customer>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        if customers.is_empty() {
            return invalid("at least one customer is required".into());
        }
        if !(capacity >= 0.0) {
            return invalid(format!("capacity {capacity} is negative"));
        }
        if !(depot.horizon_end >= depot.horizon_start) {
            return invalid(format!(
                "depot horizon [{}, {}] is reversed",
                depot.horizon_start, depot.horizon_end
            ));
        }
        for (k, c) in customers.iter().enumerate() {
            if c.id != k + 1 {
                return invalid(format!("customer at position {} has id {}", k + 1, c.id));
            }
            if !(c.demand >= 0.0) || c.demand > capacity {
                return invalid(format!(
                    "customer {} demand {} outside [0, {capacity}]",
                    c.id, c.demand
                ));
            }
            if !(c.unload >= 0.0) {
                return invalid(format!("customer {} has negative unload time", c.id));
            }
            if !(c.window_hi >= c.window_lo) {
                return invalid(format!(
                    "customer {} window [{}, {}] is reversed",
                    c.id, c.window_lo, c.window_hi
                ));
            }
            if !c.has_window
                && (c.window_lo != depot.horizon_start || c.window_hi != depot.horizon_end)
            {
                return invalid(format!(
                    "customer {} has no window but does not carry the depot horizon",
                    c.id
                ));
            }
        }

        let n = customers.len() + 1;
        let coord = |v: usize| {
            if v == 0 {
                (depot.x, depot.y)
            } else {
                (customers[v - 1].x, customers[v - 1].y)
            }
        };
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (xi, yi) = coord(i);
                let (xj, yj) = coord(j);
                dist[i * n + j] = (xi - xj).hypot(yi - yj);
            }
        }

        Ok(Self {
            name: name.into(),
            class,
            capacity,
            depot,
            customers,
            dist,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> &InstanceSpec {
        &self.class
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn depot(&self) -> &Depot {
        &self.depot
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    /// Number of customers `N`.
    pub fn len(&self) -> usize {
        self.customers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub fn customer(&self, id: CustomerId) -> Result<&Customer> {
        if id == 0 {
            return Err(Error::InvalidCustomer(id));
        }
        self.customers.get(id - 1).ok_or(Error::InvalidCustomer(id))
    }

    /// Travel time between two vertices (0 is the depot).
    #[inline]
    pub fn travel(&self, from: usize, to: usize) -> f64 {
        self.dist[from * (self.customers.len() + 1) + to]
    }

    #[inline]
    pub(crate) fn demand_of(&self, id: CustomerId) -> f64 {
        self.customers[id - 1].demand
    }

    #[inline]
    pub(crate) fn unload_of(&self, id: CustomerId) -> f64 {
        self.customers[id - 1].unload
    }

    fn check_route(&self, route: &[CustomerId]) -> Result<()> {
        if route.is_empty() {
            return Err(Error::EmptyRoute);
        }
        match route.iter().find(|&&id| id == 0 || id > self.len()) {
            Some(&id) => Err(Error::InvalidCustomer(id)),
            None => Ok(()),
        }
    }
}

/// Arrival time at every customer of the route, in visiting order.
pub fn arrival_times(instance: &Instance, route: &[CustomerId]) -> Result<Vec<f64>> {
    instance.check_route(route)?;
    let mut out = Vec::with_capacity(route.len());
    let mut prev = 0;
    let mut clock = instance.depot.horizon_start;
    for &c in route {
        if prev != 0 {
            clock += instance.unload_of(prev);
        }
        clock += instance.travel(prev, c);
        out.push(clock);
        prev = c;
    }
    Ok(out)
}

/// Time at which the vehicle is back at the depot, given the arrival at the
/// last customer.
#[inline]
pub(crate) fn closing_time(instance: &Instance, last: CustomerId, last_arrival: f64) -> f64 {
    last_arrival + instance.unload_of(last) + instance.travel(last, 0)
}

/// Total time `t(r)` of a route: departure at `a0`, every travel leg and
/// unload, and the return to the depot.
pub fn route_time(instance: &Instance, route: &[CustomerId]) -> Result<f64> {
    let arrivals = arrival_times(instance, route)?;
    let last = route[route.len() - 1];
    Ok(closing_time(instance, last, arrivals[arrivals.len() - 1]))
}

/// Sum of the demands of the customers on the route.
pub fn route_load(instance: &Instance, route: &[CustomerId]) -> Result<f64> {
    instance.check_route(route)?;
    Ok(route.iter().map(|&c| instance.demand_of(c)).sum())
}

/// Route duration within the depot horizon and load within capacity.
pub fn is_feasible(instance: &Instance, route: &[CustomerId]) -> bool {
    match (route_time(instance, route), route_load(instance, route)) {
        (Ok(time), Ok(load)) => time <= instance.depot.horizon_end && load <= instance.capacity,
        _ => false,
    }
}

/// Objective vector `(g1, g2, g3, g4)`: total route time, number of routes,
/// total window violation and number of violated windows. All minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Objectives(pub [f64; 4]);

impl Objectives {
    pub const DIM: usize = 4;

    pub fn new(total_time: f64, routes: usize, violation: f64, violated: usize) -> Self {
        Self([total_time, routes as f64, violation, violated as f64])
    }

    pub fn total_time(&self) -> f64 {
        self.0[0]
    }

    pub fn routes(&self) -> usize {
        self.0[1] as usize
    }

    pub fn violation(&self) -> f64 {
        self.0[2]
    }

    pub fn violated(&self) -> usize {
        self.0[3] as usize
    }

    pub fn values(&self) -> &[f64; 4] {
        &self.0
    }
}

impl fmt::Display for Objectives {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a} {b} {c} {d}")
    }
}

/// Evaluates a set of routes.
///
/// The result depends only on the set of routes, not on the order they are
/// listed in: route times are summed by ascending first customer and window
/// violations by ascending customer id.
pub fn evaluate(instance: &Instance, routes: &[Route]) -> Result<Objectives> {
    check_partition(instance, routes)?;
    let n = instance.len();
    let mut violation = vec![0.0; n + 1];
    let mut flags = vec![0u32; n + 1];
    let mut times: Vec<(CustomerId, f64)> = Vec::with_capacity(routes.len());

    for route in routes {
        let arrivals = arrival_times(instance, route)?;
        for (&c, &t) in route.iter().zip(&arrivals) {
            let (w, u) = instance.customers[c - 1].window_violation(t);
            violation[c] = w;
            flags[c] = u;
        }
        let last = route[route.len() - 1];
        times.push((route[0], closing_time(instance, last, arrivals[arrivals.len() - 1])));
    }
    times.sort_unstable_by_key(|&(first, _)| first);

    let g1: f64 = times.iter().map(|&(_, t)| t).sum();
    let g3: f64 = violation[1..].iter().sum();
    let g4: u32 = flags[1..].iter().sum();
    Ok(Objectives::new(g1, routes.len(), g3, g4 as usize))
}

fn check_partition(instance: &Instance, routes: &[Route]) -> Result<()> {
    let n = instance.len();
    let mut seen = vec![false; n + 1];
    let mut count = 0usize;
    for route in routes {
        instance.check_route(route)?;
        for &c in route {
            if seen[c] {
                return Err(Error::NotAPartition(format!("customer {c} is visited twice")));
            }
            seen[c] = true;
            count += 1;
        }
    }
    if count != n {
        let missing = (1..=n).find(|&c| !seen[c]).unwrap_or(0);
        return Err(Error::NotAPartition(format!("customer {missing} is not visited")));
    }
    Ok(())
}

/// Routes in canonical order: sorted by their first customer. Two solutions
/// are the same decision iff their canonical forms are equal.
pub type CanonicalRoutes = Vec<Route>;

/// An evaluated set of routes.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub objectives: Objectives,
}

impl Solution {
    pub fn evaluate(instance: &Instance, routes: Vec<Route>) -> Result<Self> {
        let objectives = evaluate(instance, &routes)?;
        Ok(Self { routes, objectives })
    }

    pub fn canonical(&self) -> CanonicalRoutes {
        let mut routes = self.routes.clone();
        routes.sort_unstable_by_key(|r| r[0]);
        routes
    }

    /// Every customer appears in exactly one route.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut ids: Vec<_> = self.routes.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids.len() == n && ids.iter().enumerate().all(|(k, &c)| c == k + 1)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::instances::{Distribution, InstanceSpec};

    pub(crate) fn customer(id: usize, x: f64, y: f64, demand: f64, unload: f64) -> Customer {
        Customer {
            id,
            x,
            y,
            demand,
            unload,
            window_lo: 0.0,
            window_hi: 1000.0,
            has_window: false,
        }
    }

    pub(crate) fn with_window(mut c: Customer, lo: f64, hi: f64) -> Customer {
        c.window_lo = lo;
        c.window_hi = hi;
        c.has_window = true;
        c
    }

    fn spec(n: usize) -> InstanceSpec {
        InstanceSpec {
            alpha: Distribution::Random,
            beta: n,
            gamma: 0.0,
            delta: 0.0,
        }
    }

    /// Builds an instance, giving windowless customers the depot horizon.
    pub(crate) fn build(capacity: f64, depot: Depot, mut cs: Vec<Customer>) -> Instance {
        for c in cs.iter_mut().filter(|c| !c.has_window) {
            c.window_lo = depot.horizon_start;
            c.window_hi = depot.horizon_end;
        }
        let n = cs.len();
        Instance::new("test", spec(n), capacity, depot, cs).unwrap()
    }

    pub(crate) fn depot(a0: f64, b0: f64) -> Depot {
        Depot {
            x: 0.0,
            y: 0.0,
            horizon_start: a0,
            horizon_end: b0,
        }
    }

    /// Three customers on Pythagorean coordinates so every leg is integral.
    ///
    /// depot (0,0) -> c1 (3,4): 5, c1 -> c2 (3,0): 4, c2 -> c3 (0,4): 5,
    /// c3 -> depot: 4.
    fn three() -> Instance {
        build(
            10.0,
            depot(10.0, 100.0),
            vec![
                with_window(customer(1, 3.0, 4.0, 2.0, 2.0), 20.0, 30.0),
                customer(2, 3.0, 0.0, 3.0, 3.0),
                with_window(customer(3, 0.0, 4.0, 4.0, 1.0), 0.0, 25.0),
            ],
        )
    }

    #[test]
    fn single_customer_route_time() {
        let inst = build(
            10.0,
            depot(0.0, 1000.0),
            vec![customer(1, 6.0, 8.0, 1.0, 5.0)],
        );
        assert_eq!(route_time(&inst, &[1]).unwrap(), 25.0);
        assert_eq!(arrival_times(&inst, &[1]).unwrap(), vec![10.0]);
    }

    #[test]
    fn empty_route_is_rejected() {
        let inst = three();
        assert!(matches!(route_time(&inst, &[]), Err(Error::EmptyRoute)));
        assert!(matches!(route_load(&inst, &[]), Err(Error::EmptyRoute)));
        assert!(matches!(route_time(&inst, &[4]), Err(Error::InvalidCustomer(4))));
        assert!(matches!(route_time(&inst, &[0]), Err(Error::InvalidCustomer(0))));
    }

    #[test]
    fn hand_traced_three_customer_route() {
        let inst = three();
        // 10 + 5 + (4 + 2) + (5 + 3) + 1 + 4
        assert_eq!(route_time(&inst, &[1, 2, 3]).unwrap(), 34.0);
        let arrivals = arrival_times(&inst, &[1, 2, 3]).unwrap();
        assert_eq!(arrivals, vec![15.0, 21.0, 29.0]);
        assert_eq!(arrivals[2] + 1.0 + 4.0, 34.0);
        assert_eq!(route_load(&inst, &[1, 2, 3]).unwrap(), 9.0);

        // c1 early by 5, c3 late by 4.
        let g = evaluate(&inst, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(g, Objectives::new(34.0, 1, 9.0, 2));
    }

    #[test]
    fn two_leg_arrivals() {
        // depot -> c1 = 10, c1 -> c2 = 7 (on a line), u(c1) = 5.
        let inst = build(
            10.0,
            depot(0.0, 1000.0),
            vec![customer(1, 10.0, 0.0, 1.0, 5.0), customer(2, 17.0, 0.0, 1.0, 0.0)],
        );
        assert_eq!(arrival_times(&inst, &[1, 2]).unwrap(), vec![10.0, 22.0]);
        assert_eq!(route_time(&inst, &[1, 2]).unwrap(), 22.0 + 17.0);
    }

    #[test]
    fn window_violation_cases() {
        assert_eq!(window_violation(10.0, 20.0, 15.0), (0.0, 0));
        assert_eq!(window_violation(10.0, 20.0, 7.0), (3.0, 1));
        assert_eq!(window_violation(10.0, 20.0, 26.0), (6.0, 1));
        assert_eq!(window_violation(10.0, 20.0, 10.0), (0.0, 0));
        assert_eq!(window_violation(10.0, 20.0, 20.0), (0.0, 0));
    }

    #[test]
    fn load_examples() {
        let inst = build(
            10.0,
            depot(0.0, 1000.0),
            vec![
                customer(1, 1.0, 0.0, 3.0, 0.0),
                customer(2, 2.0, 0.0, 4.0, 0.0),
                customer(3, 3.0, 0.0, 0.0, 0.0),
            ],
        );
        assert_eq!(route_load(&inst, &[1, 2]).unwrap(), 7.0);
        assert_eq!(route_load(&inst, &[3]).unwrap(), 0.0);
    }

    #[test]
    fn feasibility_boundaries() {
        // Round trip to c1 at distance 10 with unload 5 takes 25.
        let make = |capacity: f64, b0: f64| {
            build(
                capacity,
                depot(0.0, b0),
                vec![customer(1, 10.0, 0.0, 4.0, 5.0), customer(2, 10.0, 0.0, 3.0, 0.0)],
            )
        };
        let inst = make(7.0, 1000.0);
        assert!(is_feasible(&inst, &[1, 2]));
        let inst = make(6.0, 1000.0);
        assert!(!is_feasible(&inst, &[1, 2]));
        let inst = make(10.0, 25.0);
        assert!(is_feasible(&inst, &[1]));
        let inst = make(10.0, 24.999);
        assert!(!is_feasible(&inst, &[1]));
    }

    #[test]
    fn full_horizon_windows_never_violate() {
        let inst = build(
            100.0,
            depot(0.0, 1000.0),
            vec![
                customer(1, 1.0, 5.0, 1.0, 2.0),
                customer(2, -4.0, 2.0, 1.0, 2.0),
                customer(3, 7.0, -3.0, 1.0, 2.0),
            ],
        );
        let g = evaluate(&inst, &[vec![2, 1], vec![3]]).unwrap();
        assert_eq!(g.violation(), 0.0);
        assert_eq!(g.violated(), 0);
        assert_eq!(g.routes(), 2);
    }

    #[test]
    fn partition_violations() {
        let inst = three();
        assert!(matches!(
            evaluate(&inst, &[vec![1, 2]]),
            Err(Error::NotAPartition(_))
        ));
        assert!(matches!(
            evaluate(&inst, &[vec![1, 2], vec![2, 3]]),
            Err(Error::NotAPartition(_))
        ));
        assert!(evaluate(&inst, &[vec![3], vec![2, 1]]).is_ok());
    }

    #[test]
    fn evaluation_ignores_route_order() {
        let inst = three();
        let a = evaluate(&inst, &[vec![3], vec![2, 1]]).unwrap();
        let b = evaluate(&inst, &[vec![2, 1], vec![3]]).unwrap();
        assert_eq!(a.0.map(f64::to_bits), b.0.map(f64::to_bits));
    }

    #[test]
    fn instance_invariants() {
        let bad_demand = Instance::new(
            "x",
            spec(1),
            1.0,
            depot(0.0, 10.0),
            vec![customer(1, 0.0, 0.0, 2.0, 0.0)],
        );
        assert!(bad_demand.is_err());
        let reversed = Instance::new(
            "x",
            spec(1),
            5.0,
            depot(0.0, 1000.0),
            vec![with_window(customer(1, 0.0, 0.0, 2.0, 0.0), 5.0, 4.0)],
        );
        assert!(reversed.is_err());
        let unbound = Instance::new(
            "x",
            spec(1),
            5.0,
            depot(0.0, 10.0),
            vec![customer(1, 0.0, 0.0, 2.0, 0.0)],
        );
        assert!(unbound.is_err(), "windowless customer must carry the horizon");
        assert!(Instance::new("x", spec(0), 5.0, depot(0.0, 10.0), vec![]).is_err());
    }

    #[test]
    fn canonical_form_sorts_by_first_customer() {
        let inst = three();
        let s = Solution::evaluate(&inst, vec![vec![3], vec![2, 1]]).unwrap();
        assert_eq!(s.canonical(), vec![vec![2, 1], vec![3]]);
        assert!(s.is_partition_of(3));
    }
}

//! Pickup and delivery with time windows (minimise total distance).
//!
//! Instances use the Li & Lim text layout: a header `vehicles capacity [speed]`
//! followed by one line per location
//! `id x y demand earliest latest service pickup_partner delivery_partner`,
//! with location 0 as the depot. A pickup has `pickup_partner = 0` and names
//! its delivery; a delivery names its pickup and has `delivery_partner = 0`.
//!
//! The solution lists one route per line as location ids; the depot is
//! implicit at both ends. Distances are unrounded Euclidean.

use std::fmt::Write as _;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: i64,
    pub earliest: f64,
    pub latest: f64,
    pub service: f64,
    pub pickup: usize,
    pub delivery: usize,
}

impl Location {
    pub fn is_pickup(&self) -> bool {
        self.demand > 0
    }

    /// The paired location of a pickup or delivery.
    pub fn partner(&self) -> usize {
        if self.is_pickup() {
            self.delivery
        } else {
            self.pickup
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdptwInstance {
    pub vehicles: usize,
    pub capacity: i64,
    pub locations: Vec<Location>,
}

impl PdptwInstance {
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        let (p, q) = (&self.locations[a], &self.locations[b]);
        let (dx, dy) = (p.x - q.x, p.y - q.y);
        (dx * dx + dy * dy).sqrt()
    }

    pub fn requests(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.locations
            .iter()
            .filter(|l| l.is_pickup())
            .map(|l| (l.id, l.delivery))
    }

    /// Distance of a route including both depot legs.
    pub fn route_distance(&self, route: &[usize]) -> f64 {
        let mut total = 0.0;
        let mut prev = 0;
        for &k in route {
            total += self.dist(prev, k);
            prev = k;
        }
        if !route.is_empty() {
            total += self.dist(prev, 0);
        }
        total
    }

    /// Start-of-service times along `route`, without checking windows.
    pub fn service_starts(&self, route: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(route.len());
        let mut t = self.locations[0].earliest;
        let mut prev = 0;
        for &k in route {
            let loc = &self.locations[k];
            t = (t + self.locations[prev].service + self.dist(prev, k)).max(loc.earliest);
            out.push(t);
            prev = k;
        }
        out
    }
}

fn field<T: std::str::FromStr>(ln: usize, tok: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::at_line(ln, format!("invalid value `{tok}`")))
}

pub fn parse_pdptw(text: &str) -> Result<PdptwInstance, ParseError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| ParseError::new("empty instance"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&h.len()) {
        return Err(ParseError::at_line(ln, "header must be `vehicles capacity [speed]`"));
    }
    let vehicles: usize = field(ln, h[0])?;
    let capacity: i64 = field(ln, h[1])?;
    if vehicles == 0 || capacity <= 0 {
        return Err(ParseError::at_line(ln, "vehicles and capacity must be positive"));
    }
    let mut locations = Vec::new();
    for (ln, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 9 {
            return Err(ParseError::at_line(ln, format!("expected 9 fields, got {}", t.len())));
        }
        let loc = Location {
            id: field(ln, t[0])?,
            x: field(ln, t[1])?,
            y: field(ln, t[2])?,
            demand: field(ln, t[3])?,
            earliest: field(ln, t[4])?,
            latest: field(ln, t[5])?,
            service: field(ln, t[6])?,
            pickup: field(ln, t[7])?,
            delivery: field(ln, t[8])?,
        };
        if loc.id != locations.len() {
            return Err(ParseError::at_line(ln, format!("location ids must be consecutive from 0; got {}", loc.id)));
        }
        if [loc.x, loc.y, loc.earliest, loc.latest, loc.service].iter().any(|v| !v.is_finite()) || loc.service < 0.0 {
            return Err(ParseError::at_line(ln, "non-finite or negative value"));
        }
        if loc.earliest > loc.latest {
            return Err(ParseError::at_line(ln, format!("location {} has an empty time window", loc.id)));
        }
        locations.push(loc);
    }
    if locations.is_empty() {
        return Err(ParseError::new("missing depot line"));
    }
    let n = locations.len();
    if locations[0].demand != 0 {
        return Err(ParseError::new("depot demand must be 0"));
    }
    for l in &locations[1..] {
        let bad = |msg: &str| Err(ParseError::new(format!("location {}: {msg}", l.id)));
        if l.demand == 0 {
            return bad("demand must be non-zero");
        }
        let partner = l.partner();
        if partner == 0 || partner >= n || partner == l.id {
            return bad("invalid partner reference");
        }
        let p = &locations[partner];
        let consistent = if l.is_pickup() {
            l.pickup == 0 && p.pickup == l.id && p.delivery == 0 && p.demand == -l.demand
        } else {
            l.delivery == 0 && p.delivery == l.id && p.demand == -l.demand
        };
        if !consistent {
            return bad("pickup/delivery pairing is inconsistent");
        }
    }
    Ok(PdptwInstance {
        vehicles,
        capacity,
        locations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoutePlan(pub Vec<Vec<usize>>);

pub fn parse_routes(text: &str) -> Result<RoutePlan, ParseError> {
    let routes = content_lines(text)
        .map(|(ln, l)| l.split_whitespace().map(|t| field::<usize>(ln, t)).collect())
        .collect::<Result<Vec<Vec<usize>>, _>>()?;
    if routes.is_empty() {
        return Err(ParseError::new("no routes"));
    }
    Ok(RoutePlan(routes))
}

pub fn render_routes(rp: &RoutePlan) -> String {
    let mut s = String::new();
    for r in &rp.0 {
        let ids: Vec<String> = r.iter().map(usize::to_string).collect();
        writeln!(s, "{}", ids.join(" ")).unwrap();
    }
    s
}

/// Load, window and in-route precedence checks for one route of known ids.
pub fn check_route(inst: &PdptwInstance, k: usize, route: &[usize]) -> Vec<Violation> {
    let mut v = Vec::new();
    let mut pos = vec![usize::MAX; inst.locations.len()];
    for (i, &id) in route.iter().enumerate() {
        pos[id] = i;
    }
    for (i, &id) in route.iter().enumerate() {
        let loc = &inst.locations[id];
        if !loc.is_pickup() {
            let p = loc.pickup;
            if pos[p] == usize::MAX {
                v.push(Violation::new(
                    "pairing",
                    format!("route {k}: delivery {id} is served without its pickup {p}"),
                ));
            } else if pos[p] > i {
                v.push(Violation::new(
                    "precedence",
                    format!("route {k}: delivery {id} comes before its pickup {p}"),
                ));
            }
        } else if pos[loc.delivery] == usize::MAX {
            v.push(Violation::new(
                "pairing",
                format!("route {k}: pickup {id} is served without its delivery {}", loc.delivery),
            ));
        }
    }
    // A negative load only ever follows a precedence or pairing error, which
    // has been reported already.
    let mut load = 0i64;
    for &id in route {
        load += inst.locations[id].demand;
        if load > inst.capacity {
            v.push(Violation::new(
                "capacity",
                format!("route {k}: load {load} after location {id} exceeds {}", inst.capacity),
            ));
            break;
        }
    }
    let starts = inst.service_starts(route);
    for (&id, &t) in route.iter().zip(&starts) {
        let loc = &inst.locations[id];
        if t > loc.latest {
            v.push(Violation::new(
                "time window",
                format!("route {k}: arrival {t:.3} at location {id} after its latest time {}", loc.latest),
            ));
            return v;
        }
    }
    if let (Some(&last), Some(&t)) = (route.last(), starts.last()) {
        let back = t + inst.locations[last].service + inst.dist(last, 0);
        if back > inst.locations[0].latest {
            v.push(Violation::new(
                "time window",
                format!("route {k}: returns to the depot at {back:.3}, after {}", inst.locations[0].latest),
            ));
        }
    }
    v
}

pub fn verify_routes(inst: &PdptwInstance, rp: &RoutePlan) -> Vec<Violation> {
    let mut v = Vec::new();
    let n = inst.locations.len();
    let mut seen = vec![0usize; n];
    let routes: Vec<&Vec<usize>> = rp.0.iter().filter(|r| !r.is_empty()).collect();
    if routes.len() > inst.vehicles {
        v.push(Violation::new(
            "fleet",
            format!("{} routes but only {} vehicles", routes.len(), inst.vehicles),
        ));
    }
    let mut well_formed = true;
    for (k, r) in routes.iter().enumerate() {
        for &id in r.iter() {
            if id == 0 {
                v.push(Violation::new("depot", format!("route {}: the depot is implicit and must not be listed", k + 1)));
                well_formed = false;
            } else if id >= n {
                v.push(Violation::new("unknown location", format!("route {}: location {id} does not exist", k + 1)));
                well_formed = false;
            } else {
                seen[id] += 1;
            }
        }
    }
    for (id, &c) in seen.iter().enumerate().skip(1) {
        match c {
            1 => {}
            0 => v.push(Violation::new("coverage", format!("location {id} is not visited"))),
            c => {
                v.push(Violation::new("coverage", format!("location {id} is visited {c} times")));
                well_formed = false;
            }
        }
    }
    if well_formed {
        for (k, r) in routes.iter().enumerate() {
            v.extend(check_route(inst, k + 1, r));
        }
    }
    v
}

pub fn evaluate_routes(inst: &PdptwInstance, rp: &RoutePlan) -> f64 {
    rp.0.iter()
        .filter(|r| r.iter().all(|&id| id < inst.locations.len()))
        .map(|r| inst.route_distance(r))
        .sum()
}

pub struct Pdptw;

impl Problem for Pdptw {
    type Instance = PdptwInstance;
    type Solution = RoutePlan;

    const ID: ProblemId = ProblemId::Pdptw;
    const SOLVER: &'static str = "insertion_relocate";

    fn parse_instance(text: &str) -> Result<PdptwInstance, ParseError> {
        parse_pdptw(text)
    }

    fn parse_solution(_: &PdptwInstance, text: &str) -> Result<RoutePlan, ParseError> {
        parse_routes(text)
    }

    fn render_solution(solution: &RoutePlan) -> String {
        render_routes(solution)
    }

    fn verify(instance: &PdptwInstance, solution: &RoutePlan) -> Vec<Violation> {
        verify_routes(instance, solution)
    }

    fn evaluate(instance: &PdptwInstance, solution: &RoutePlan) -> f64 {
        evaluate_routes(instance, solution)
    }

    fn baseline(instance: &PdptwInstance) -> Result<RoutePlan, SolverError> {
        crate::baselines::pdptw::solve(instance).map(RoutePlan)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const ONE_REQUEST: &str = "\
1 10
0 0 0 0 0 1000 0 0 0
1 1 0 5 0 1000 0 0 2
2 2 0 -5 0 1000 0 1 0
";

    fn kinds(inst: &PdptwInstance, s: &str) -> Vec<&'static str> {
        verify_routes(inst, &parse_routes(s).unwrap()).iter().map(|v| v.kind).collect()
    }

    #[test]
    fn single_request_distance() {
        let inst = parse_pdptw(ONE_REQUEST).unwrap();
        let rp = parse_routes("1 2\n").unwrap();
        assert!(verify_routes(&inst, &rp).is_empty());
        assert_eq!(evaluate_routes(&inst, &rp), 4.0);
    }

    #[test]
    fn delivery_before_pickup() {
        let inst = parse_pdptw(ONE_REQUEST).unwrap();
        assert_eq!(kinds(&inst, "2 1\n"), vec!["precedence"]);
    }

    #[test]
    fn over_capacity_pickup() {
        let inst = parse_pdptw(&ONE_REQUEST.replace(" 5 ", " 11 ").replace("-5", "-11")).unwrap();
        assert_eq!(kinds(&inst, "1 2\n"), vec!["capacity"]);
    }

    #[test]
    fn coverage_fleet_and_pairing() {
        let inst = parse_pdptw(ONE_REQUEST).unwrap();
        assert!(kinds(&inst, "1\n").contains(&"coverage"));
        let v = kinds(&inst, "1\n2\n");
        assert!(v.contains(&"fleet") && v.contains(&"pairing"));
        assert!(kinds(&inst, "0 1 2\n").contains(&"depot"));
        assert!(kinds(&inst, "1 2 7\n").contains(&"unknown location"));
    }

    #[test]
    fn waiting_and_late_arrival() {
        // Pickup opens at 10: the vehicle waits; delivery closes at 11 + service.
        let inst = parse_pdptw(
            "1 10\n0 0 0 0 0 100 0 0 0\n1 1 0 5 10 20 2 0 2\n2 2 0 -5 0 12 0 1 0\n",
        )
        .unwrap();
        assert_eq!(inst.service_starts(&[1, 2]), vec![10.0, 13.0]);
        assert_eq!(kinds(&inst, "1 2\n"), vec!["time window"]);
        let late_depot = parse_pdptw("1 10\n0 0 0 0 0 3 0 0 0\n1 1 0 5 0 100 0 0 2\n2 2 0 -5 0 100 0 1 0\n").unwrap();
        assert_eq!(kinds(&late_depot, "1 2\n"), vec!["time window"]);
    }

    #[test]
    fn instance_validation() {
        assert!(parse_pdptw("1\n0 0 0 0 0 1 0 0 0\n").is_err());
        assert!(parse_pdptw(&ONE_REQUEST.replace("-5", "-4")).is_err());
        assert!(parse_pdptw(&ONE_REQUEST.replace("2 2 0 -5", "3 2 0 -5")).is_err());
        assert!(parse_pdptw("1 10 1\n0 0 0 0 5 1 0 0 0\n").is_err());
    }
}

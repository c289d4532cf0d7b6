//! The terminal network: terminals, routes with scheduled stops, trains.
//!
//! The default network is five terminals on four route corridors (two
//! directions each way through the Milano hub), three scheduled trains per
//! route per day. These settings stay fixed across scenarios; only the ITU
//! provision varies.

use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledStop {
    pub terminal: usize,
    /// Minutes after the train's departure time.
    pub arrive_min: u32,
    pub depart_min: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub id: String,
    pub stops: Vec<ScheduledStop>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Train {
    pub id: String,
    pub route: usize,
    /// Departure from the route's first stop, minutes after day start.
    pub departure_min: u32,
    pub cars: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFixture {
    pub terminals: Vec<String>,
    pub routes: Vec<Route>,
    pub trains: Vec<Train>,
    /// Mean of the per-terminal daily customer count.
    pub customer_mean: f64,
    pub itus_per_car: u32,
}

/// One boarding: route, board stop index, alight stop index, in stop order.
pub type Leg = (usize, usize, usize);

impl NetworkFixture {
    pub fn validate(&self) -> Result<(), String> {
        if self.terminals.is_empty() {
            return Err("fixture declares no terminals".into());
        }
        for r in &self.routes {
            if r.stops.len() < 2 {
                return Err(format!("route {} has fewer than two stops", r.id));
            }
            let mut prev = None;
            for s in &r.stops {
                if s.terminal >= self.terminals.len() {
                    return Err(format!("route {} references unknown terminal", r.id));
                }
                if s.arrive_min > s.depart_min {
                    return Err(format!("route {} stop departs before arriving", r.id));
                }
                if let Some(p) = prev {
                    if s.arrive_min <= p {
                        return Err(format!("route {} offsets must strictly increase", r.id));
                    }
                }
                prev = Some(s.depart_min);
            }
        }
        for t in &self.trains {
            if t.route >= self.routes.len() {
                return Err(format!("train {} serves unknown route", t.id));
            }
        }
        Ok(())
    }

    pub fn train_capacity(&self, train: &Train) -> u32 {
        train.cars * self.itus_per_car
    }

    /// Shortest itineraries (fewest legs, then lexicographic) between every
    /// terminal pair reachable over the route graph.
    pub fn routing_table(&self) -> BTreeMap<(usize, usize), Vec<Leg>> {
        // Direct segments: board stop i, alight stop j > i.
        let mut segments: BTreeMap<usize, Vec<(Leg, usize)>> = BTreeMap::new();
        for (ri, route) in self.routes.iter().enumerate() {
            for i in 0..route.stops.len() {
                for j in (i + 1)..route.stops.len() {
                    let from = route.stops[i].terminal;
                    let to = route.stops[j].terminal;
                    if from != to {
                        segments.entry(from).or_default().push(((ri, i, j), to));
                    }
                }
            }
        }
        let mut table = BTreeMap::new();
        for origin in 0..self.terminals.len() {
            // BFS by leg count.
            let mut best: BTreeMap<usize, Vec<Leg>> = BTreeMap::new();
            let mut queue: VecDeque<(usize, Vec<Leg>)> = VecDeque::new();
            queue.push_back((origin, Vec::new()));
            while let Some((at, path)) = queue.pop_front() {
                if let Some(next) = segments.get(&at) {
                    for (leg, to) in next {
                        if *to == origin || best.contains_key(to) {
                            continue;
                        }
                        let mut p = path.clone();
                        p.push(*leg);
                        best.insert(*to, p.clone());
                        queue.push_back((*to, p));
                    }
                }
            }
            for (dest, legs) in best {
                table.insert((origin, dest), legs);
            }
        }
        table
    }

    /// Trains serving a route, ordered by departure time.
    pub fn trains_on_route(&self, route: usize) -> Vec<usize> {
        let mut idx: Vec<usize> =
            (0..self.trains.len()).filter(|i| self.trains[*i].route == route).collect();
        idx.sort_by_key(|i| self.trains[*i].departure_min);
        idx
    }
}

/// Five terminals, four corridors through the Milano hub, three trains per
/// route per day, twenty cars per train.
pub fn default_fixture() -> NetworkFixture {
    let terminals: Vec<String> =
        ["Genova", "Torino", "Milano", "Verona", "Bologna"].map(String::from).to_vec();
    let corridor = |id: &str, a: usize, b: usize, c: usize| Route {
        id: id.into(),
        stops: vec![
            ScheduledStop { terminal: a, arrive_min: 0, depart_min: 10 },
            ScheduledStop { terminal: b, arrive_min: 85, depart_min: 95 },
            ScheduledStop { terminal: c, arrive_min: 170, depart_min: 180 },
        ],
    };
    let routes = vec![
        corridor("R1", 0, 1, 2), // Genova - Torino - Milano
        corridor("R2", 2, 3, 4), // Milano - Verona - Bologna
        corridor("R3", 4, 3, 2), // Bologna - Verona - Milano
        corridor("R4", 2, 1, 0), // Milano - Torino - Genova
    ];
    let mut trains = Vec::new();
    for (ri, route) in routes.iter().enumerate() {
        for (k, dep) in [360u32, 720, 1080].iter().enumerate() {
            trains.push(Train {
                id: format!("{}_{}", route.id.to_lowercase(), k + 1),
                route: ri,
                departure_min: *dep,
                cars: 20,
            });
        }
    }
    NetworkFixture { terminals, routes, trains, customer_mean: 8.0, itus_per_car: 2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_fixture_is_valid_and_fully_connected() {
        let f = default_fixture();
        f.validate().unwrap();
        let table = f.routing_table();
        for a in 0..f.terminals.len() {
            for b in 0..f.terminals.len() {
                if a != b {
                    let legs = table.get(&(a, b)).unwrap_or_else(|| {
                        panic!("no path {} -> {}", f.terminals[a], f.terminals[b])
                    });
                    assert!(!legs.is_empty() && legs.len() <= 2);
                }
            }
        }
    }

    #[test]
    fn transfers_go_through_the_hub() {
        let f = default_fixture();
        let table = f.routing_table();
        // Genova -> Bologna needs two legs.
        let legs = &table[&(0, 4)];
        assert_eq!(legs.len(), 2);
        let (r1, _, alight) = legs[0];
        assert_eq!(f.routes[r1].stops[alight].terminal, 2);
    }
}

//! Test instance classification, generation and the text file format.
//!
//! An instance class is written `alpha;beta;gamma;delta`, e.g. `C;20;0.70;60`:
//! clustered (`C`) or random (`R`) customer placement, the number of
//! customers, the fraction of customers with a time window and the window
//! width in time units.
//!
//! File layout, one record per line, fields separated by single spaces and
//! numbers written in shortest round-trip form:
//!
//! ```text
//! NAME <string>
//! CLASS <alpha>;<beta>;<gamma>;<delta>
//! CAPACITY <number>
//! DEPOT <x> <y> <a0> <b0>
//! CUSTOMERS <N>
//! <id> <x> <y> <demand> <unload> <a> <b> <has_window>
//! ```

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution as _, Normal};

use crate::error::{Error, Result};
use crate::model::{Customer, Depot, Instance};

/// Spatial distribution of the customers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    Clustered,
    Random,
}

impl Distribution {
    pub fn letter(self) -> char {
        match self {
            Distribution::Clustered => 'C',
            Distribution::Random => 'R',
        }
    }
}

/// The `alpha;beta;gamma;delta` classification of an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub alpha: Distribution,
    /// Number of customers.
    pub beta: usize,
    /// Fraction of customers with a time window.
    pub gamma: f64,
    /// Width of every time window.
    pub delta: f64,
}

/// The forty instance classes of the original computational study.
pub const STUDY_CLASSES: [&str; 40] = [
    "C;20;1.00;60",
    "C;20;0.70;60",
    "C;20;0.45;60",
    "C;20;0.30;60",
    "C;20;1.00;120",
    "C;20;1.00;180",
    "C;20;1.00;240",
    "C;20;1.00;360",
    "R;20;1.00;10",
    "R;20;0.70;10",
    "R;20;0.45;10",
    "R;20;0.30;10",
    "R;20;1.00;30",
    "R;20;0.70;30",
    "R;20;0.45;30",
    "R;20;0.30;30",
    "R;20;1.00;60",
    "R;20;1.00;80",
    "R;20;1.00;95",
    "R;20;1.00;115",
    "C;30;1.00;60",
    "C;30;0.70;60",
    "C;30;0.45;60",
    "C;30;0.30;60",
    "C;30;1.00;120",
    "C;30;1.00;180",
    "C;30;1.00;240",
    "C;30;1.00;360",
    "R;30;1.00;10",
    "R;30;0.70;10",
    "R;30;0.45;10",
    "R;30;0.30;10",
    "R;30;1.00;30",
    "R;30;0.70;30",
    "R;30;0.45;30",
    "R;30;0.30;30",
    "R;30;1.00;60",
    "R;30;1.00;80",
    "R;30;1.00;95",
    "R;30;1.00;115",
];

impl InstanceSpec {
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    /// Number of customers that receive a binding window.
    pub fn windowed_count(&self) -> usize {
        (self.gamma * self.beta as f64).round() as usize
    }

    /// The class string with `;` replaced, usable as a file stem.
    pub fn file_stem(&self) -> String {
        self.to_string().replace(';', "_")
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.trim().split(';').collect();
        let err = |field: usize, message: String| Error::SpecParse { field, message };
        if fields.len() != 4 {
            return Err(err(0, format!("expected 4 fields, found {}", fields.len())));
        }
        let alpha = match fields[0] {
            "C" => Distribution::Clustered,
            "R" => Distribution::Random,
            other => return Err(err(1, format!("unknown distribution {other:?}"))),
        };
        let beta: usize = fields[1]
            .parse()
            .map_err(|_| err(2, format!("{:?} is not a customer count", fields[1])))?;
        if beta < 1 {
            return Err(err(2, "at least one customer is required".into()));
        }
        let gamma: f64 = fields[2]
            .parse()
            .map_err(|_| err(3, format!("{:?} is not a number", fields[2])))?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(err(3, format!("coverage {gamma} outside [0, 1]")));
        }
        let delta: f64 = fields[3]
            .parse()
            .map_err(|_| err(4, format!("{:?} is not a number", fields[3])))?;
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(err(4, format!("window width {delta} must be finite and >= 0")));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }
}

impl fmt::Display for InstanceSpec {
    /// Coverage is printed with two decimals whenever that is exact
    /// (`0.70`, `1.00`), otherwise in shortest round-trip form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fixed = format!("{:.2}", self.gamma);
        let gamma = if fixed.parse::<f64>().ok() == Some(self.gamma) {
            fixed
        } else {
            self.gamma.to_string()
        };
        write!(f, "{};{};{};{}", self.alpha.letter(), self.beta, gamma, self.delta)
    }
}

/// Generator settings that the classification leaves open.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Side of the square plane; the depot sits at its center.
    pub plane: f64,
    pub demand_min: u32,
    pub demand_max: u32,
    pub unload: f64,
    pub capacity: f64,
    pub horizon_start: f64,
    pub horizon_end: f64,
    /// Number of cluster centers for clustered instances; `None` means
    /// `max(2, beta / 10)`.
    pub clusters: Option<usize>,
    /// Standard deviation of customer offsets around a cluster center.
    pub cluster_spread: f64,
}

impl GenParams {
    /// Defaults shaped after the classic clustered and random benchmark
    /// families: long horizon and service times for clustered sets, a short
    /// horizon for random ones.
    pub fn for_distribution(alpha: Distribution) -> Self {
        match alpha {
            Distribution::Clustered => Self {
                plane: 100.0,
                demand_min: 10,
                demand_max: 40,
                unload: 90.0,
                capacity: 200.0,
                horizon_start: 0.0,
                horizon_end: 1236.0,
                clusters: None,
                cluster_spread: 5.0,
            },
            Distribution::Random => Self {
                plane: 100.0,
                demand_min: 1,
                demand_max: 40,
                unload: 10.0,
                capacity: 200.0,
                horizon_start: 0.0,
                horizon_end: 230.0,
                clusters: None,
                cluster_spread: 5.0,
            },
        }
    }

    fn validate(&self, spec: &InstanceSpec) -> Result<()> {
        let gen = |m: String| Err(Error::Generation(m));
        if !(self.plane > 0.0) {
            return gen(format!("plane size {} must be positive", self.plane));
        }
        if self.demand_min > self.demand_max {
            return gen("demand range is reversed".into());
        }
        if f64::from(self.demand_max) > self.capacity {
            return gen(format!(
                "maximum demand {} exceeds capacity {}",
                self.demand_max, self.capacity
            ));
        }
        if !(self.horizon_end >= self.horizon_start) {
            return gen("horizon is reversed".into());
        }
        if spec.delta > self.horizon_end - self.horizon_start {
            return gen(format!(
                "window width {} exceeds the horizon length {}",
                spec.delta,
                self.horizon_end - self.horizon_start
            ));
        }
        if !(self.unload >= 0.0) || !(self.cluster_spread >= 0.0) {
            return gen("unload time and cluster spread must be >= 0".into());
        }
        Ok(())
    }
}

/// Generates an instance of the given class.
///
/// Coordinates are integral. Exactly `round(gamma * beta)` customers, chosen
/// uniformly, get a window of width `delta` placed uniformly inside the
/// horizon.
pub fn generate<R: Rng + ?Sized>(
    spec: &InstanceSpec,
    params: &GenParams,
    name: impl Into<String>,
    rng: &mut R,
) -> Result<Instance> {
    params.validate(spec)?;
    let center = params.plane / 2.0;
    let depot = Depot {
        x: center,
        y: center,
        horizon_start: params.horizon_start,
        horizon_end: params.horizon_end,
    };
    let snap = |v: f64| v.round().clamp(0.0, params.plane);

    let coords: Vec<(f64, f64)> = match spec.alpha {
        Distribution::Random => (0..spec.beta)
            .map(|_| {
                (
                    snap(rng.random_range(0.0..=params.plane)),
                    snap(rng.random_range(0.0..=params.plane)),
                )
            })
            .collect(),
        Distribution::Clustered => {
            let k = params.clusters.unwrap_or((spec.beta / 10).max(2)).max(1);
            let margin = 0.15 * params.plane;
            let centers: Vec<(f64, f64)> = (0..k)
                .map(|_| {
                    (
                        rng.random_range(margin..=params.plane - margin),
                        rng.random_range(margin..=params.plane - margin),
                    )
                })
                .collect();
            let spread = Normal::new(0.0, params.cluster_spread)
                .map_err(|e| Error::Generation(e.to_string()))?;
            (0..spec.beta)
                .map(|i| {
                    let (cx, cy) = centers[i % k];
                    (
                        snap(cx + spread.sample(rng)),
                        snap(cy + spread.sample(rng)),
                    )
                })
                .collect()
        }
    };

    let mut customers: Vec<Customer> = coords
        .iter()
        .enumerate()
        .map(|(k, &(x, y))| Customer {
            id: k + 1,
            x,
            y,
            demand: f64::from(rng.random_range(params.demand_min..=params.demand_max)),
            unload: params.unload,
            window_lo: params.horizon_start,
            window_hi: params.horizon_end,
            has_window: false,
        })
        .collect();

    let mut windowed = index::sample(rng, spec.beta, spec.windowed_count()).into_vec();
    windowed.sort_unstable();
    for k in windowed {
        let c = &mut customers[k];
        let latest = params.horizon_end - spec.delta;
        let mut lo = if latest > params.horizon_start {
            rng.random_range(params.horizon_start..=latest)
        } else {
            params.horizon_start
        };
        if lo + spec.delta > params.horizon_end {
            lo = latest;
        }
        c.window_lo = lo;
        c.window_hi = lo + spec.delta;
        c.has_window = true;
    }

    Instance::new(name, *spec, params.capacity, depot, customers)
}

/// Writes an instance in the text format.
pub fn write_instance<W: Write>(instance: &Instance, mut sink: W) -> std::io::Result<()> {
    writeln!(sink, "NAME {}", instance.name())?;
    writeln!(sink, "CLASS {}", instance.class())?;
    writeln!(sink, "CAPACITY {}", instance.capacity())?;
    let d = instance.depot();
    writeln!(
        sink,
        "DEPOT {} {} {} {}",
        d.x, d.y, d.horizon_start, d.horizon_end
    )?;
    writeln!(sink, "CUSTOMERS {}", instance.len())?;
    for c in instance.customers() {
        writeln!(
            sink,
            "{} {} {} {} {} {} {} {}",
            c.id,
            c.x,
            c.y,
            c.demand,
            c.unload,
            c.window_lo,
            c.window_hi,
            u8::from(c.has_window)
        )?;
    }
    Ok(())
}

pub fn instance_to_string(instance: &Instance) -> String {
    let mut buf = Vec::new();
    write_instance(instance, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("instance text is UTF-8")
}

struct LineReader<R> {
    lines: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> LineReader<R> {
    fn bad(&self, message: String) -> Error {
        Error::InstanceParse {
            line: self.line,
            message,
        }
    }

    fn next(&mut self) -> Result<Option<String>> {
        match self.lines.next() {
            Some(text) => {
                self.line += 1;
                text.map(Some).map_err(|e| self.bad(e.to_string()))
            }
            None => Ok(None),
        }
    }

    fn keyed(&mut self, section: &str) -> Result<String> {
        let Some(text) = self.next()? else {
            return Err(Error::InstanceParse {
                line: self.line + 1,
                message: format!("missing {section} section"),
            });
        };
        match text.split_once(' ') {
            Some((key, rest)) if key == section => Ok(rest.to_string()),
            _ => Err(self.bad(format!("expected {section} section, found {text:?}"))),
        }
    }
}

/// Reads an instance written by [`write_instance`].
pub fn read_instance<R: BufRead>(source: R) -> Result<Instance> {
    let mut r = LineReader {
        lines: source.lines(),
        line: 0,
    };

    let name = r.keyed("NAME")?;
    let class: InstanceSpec = r
        .keyed("CLASS")?
        .parse()
        .map_err(|e: Error| r.bad(e.to_string()))?;
    let capacity = parse_num(&r.keyed("CAPACITY")?, r.line)?;
    let nums = parse_nums(&r.keyed("DEPOT")?, 4, r.line)?;
    let depot = Depot {
        x: nums[0],
        y: nums[1],
        horizon_start: nums[2],
        horizon_end: nums[3],
    };
    let count = r.keyed("CUSTOMERS")?;
    let count: usize = count
        .parse()
        .map_err(|_| r.bad(format!("{count:?} is not a customer count")))?;

    let mut customers = Vec::with_capacity(count);
    for k in 0..count {
        let Some(text) = r.next()? else {
            return Err(Error::InstanceParse {
                line: r.line + 1,
                message: format!("CUSTOMERS section truncated: {k} of {count} records"),
            });
        };
        let fields: Vec<&str> = text.split(' ').collect();
        if fields.len() != 8 {
            return Err(r.bad(format!("expected 8 fields, found {}", fields.len())));
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| r.bad(format!("{:?} is not a customer id", fields[0])))?;
        let nums = fields[1..7]
            .iter()
            .map(|f| parse_num(f, r.line))
            .collect::<Result<Vec<f64>>>()?;
        let has_window = match fields[7] {
            "0" => false,
            "1" => true,
            other => {
                return Err(r.bad(format!("has_window must be 0 or 1, found {other:?}")))
            }
        };
        customers.push(Customer {
            id,
            x: nums[0],
            y: nums[1],
            demand: nums[2],
            unload: nums[3],
            window_lo: nums[4],
            window_hi: nums[5],
            has_window,
        });
    }
    while let Some(text) = r.next()? {
        if !text.trim().is_empty() {
            return Err(r.bad(format!("unexpected trailing content {text:?}")));
        }
    }
    Instance::new(name, class, capacity, depot, customers).map_err(|e| r.bad(e.to_string()))
}

pub fn instance_from_str(text: &str) -> Result<Instance> {
    read_instance(text.as_bytes())
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::InstanceParse {
        line,
        message: format!("{s:?} is not a number"),
    })
}

fn parse_nums(s: &str, count: usize, line: usize) -> Result<Vec<f64>> {
    let nums = s
        .split(' ')
        .map(|f| parse_num(f, line))
        .collect::<Result<Vec<_>>>()?;
    if nums.len() != count {
        return Err(Error::InstanceParse {
            line,
            message: format!("expected {count} numbers, found {}", nums.len()),
        });
    }
    Ok(nums)
}

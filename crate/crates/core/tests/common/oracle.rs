//! Brute-force STL reference: random formulas with bounds counted in trace
//! steps, evaluated on a grid ten times finer than the trace.

use hyrepair::model::ModeId;
use hyrepair::Trace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const H: f64 = 0.1;
pub const SAMPLES: usize = 41;
pub const FINE: usize = 10;

/// Formula tree with bounds counted in trace steps, so the oracle can work
/// purely on grid indices.
#[derive(Debug, Clone)]
pub enum Gen {
    /// `k0 * x + k1 * y - c`, always linear in the signals.
    Lin(f64, f64, f64, bool),
    Not(Box<Gen>),
    And(Box<Gen>, Box<Gen>),
    Or(Box<Gen>, Box<Gen>),
    G(usize, Option<usize>, Box<Gen>),
    F(usize, Option<usize>, Box<Gen>),
}

impl Gen {
    pub fn source(&self) -> String {
        let bounds = |a: &usize, b: &Option<usize>| {
            let hi = b.map_or("inf".to_string(), |b| format!("{}", b as f64 * H));
            format!("[{}, {hi}]", *a as f64 * H)
        };
        match self {
            Gen::Lin(k0, k1, c, gt) => {
                format!("{k0} * x + {k1} * y {} {c}", if *gt { ">" } else { "<=" })
            }
            Gen::Not(a) => format!("not ({})", a.source()),
            Gen::And(a, b) => format!("({}) and ({})", a.source(), b.source()),
            Gen::Or(a, b) => format!("({}) or ({})", a.source(), b.source()),
            Gen::G(a, b, f) => format!("G{} ({})", bounds(a, b), f.source()),
            Gen::F(a, b, f) => format!("F{} ({})", bounds(a, b), f.source()),
        }
    }

    /// Horizon in trace steps.
    pub fn steps(&self) -> usize {
        match self {
            Gen::Lin(..) => 0,
            Gen::Not(a) => a.steps(),
            Gen::And(a, b) | Gen::Or(a, b) => a.steps().max(b.steps()),
            Gen::G(a, b, f) | Gen::F(a, b, f) => b.unwrap_or(*a) + f.steps(),
        }
    }

    pub fn temporal(&self) -> usize {
        match self {
            Gen::Lin(..) => 0,
            Gen::Not(a) => a.temporal(),
            Gen::And(a, b) | Gen::Or(a, b) => a.temporal() + b.temporal(),
            Gen::G(_, _, f) | Gen::F(_, _, f) => 1 + f.temporal(),
        }
    }

    /// Dense robustness signal on the fine grid.
    pub fn dense(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = x.len();
        match self {
            Gen::Lin(k0, k1, c, gt) => (0..n)
                .map(|i| {
                    let v = k0 * x[i] + k1 * y[i] - c;
                    if *gt {
                        v
                    } else {
                        -v
                    }
                })
                .collect(),
            Gen::Not(a) => a.dense(x, y).iter().map(|v| -v).collect(),
            Gen::And(a, b) => a.dense(x, y).iter().zip(b.dense(x, y)).map(|(p, q)| p.min(q)).collect(),
            Gen::Or(a, b) => a.dense(x, y).iter().zip(b.dense(x, y)).map(|(p, q)| p.max(q)).collect(),
            Gen::G(a, b, f) | Gen::F(a, b, f) => {
                let sign = if matches!(self, Gen::G(..)) { 1.0 } else { -1.0 };
                let child: Vec<f64> = f.dense(x, y).iter().map(|v| sign * v).collect();
                let last = n - 1;
                (0..n)
                    .map(|j| {
                        let lo = (j + a * FINE).min(last);
                        let hi = match b {
                            Some(b) => (j + b * FINE).min(last),
                            None => (last - f.steps() * FINE).max(lo),
                        };
                        sign * child[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min)
                    })
                    .collect()
            }
        }
    }
}

pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Gen {
    let pick = if depth == 0 { 0 } else { rng.random_range(0..6) };
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_formula(rng, depth - 1));
    let bounds = |rng: &mut ChaCha8Rng| {
        let a = rng.random_range(0..8);
        let b = if rng.random_bool(0.15) { None } else { Some(a + rng.random_range(0..8)) };
        (a, b)
    };
    match pick {
        0 => Gen::Lin(
            rng.random_range(-2i32..=2) as f64,
            rng.random_range(-2i32..=2) as f64,
            rng.random_range(-20i32..=20) as f64 / 4.0,
            rng.random_bool(0.5),
        ),
        1 => Gen::Not(sub(rng)),
        2 => Gen::And(sub(rng), sub(rng)),
        3 => Gen::Or(sub(rng), sub(rng)),
        4 => {
            let (a, b) = bounds(rng);
            Gen::G(a, b, sub(rng))
        }
        _ => {
            let (a, b) = bounds(rng);
            Gen::F(a, b, sub(rng))
        }
    }
}

pub fn random_walk(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = rng.random_range(-3.0..3.0);
    (0..SAMPLES)
        .map(|_| {
            v += rng.random_range(-1.0..1.0);
            v
        })
        .collect()
}

pub fn trace(x: &[f64], y: &[f64]) -> Trace {
    let mut tr = Trace::new(vec!["x".into(), "y".into()], 2);
    for k in 0..x.len() {
        tr.push(k as f64 * H, ModeId(0), [x[k], y[k]]);
    }
    tr
}

pub fn upsample(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity((v.len() - 1) * FINE + 1);
    for w in v.windows(2) {
        for i in 0..FINE {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / FINE as f64);
        }
    }
    out.push(v[v.len() - 1]);
    out
}

/// Largest change of any atom of `f` between consecutive samples.
pub fn atom_variation(f: &Gen, x: &[f64], y: &[f64]) -> f64 {
    match f {
        Gen::Lin(k0, k1, ..) => {
            (1..x.len()).map(|i| (k0 * (x[i] - x[i - 1]) + k1 * (y[i] - y[i - 1])).abs()).fold(0.0, f64::max)
        }
        Gen::Not(a) => atom_variation(a, x, y),
        Gen::And(a, b) | Gen::Or(a, b) => atom_variation(a, x, y).max(atom_variation(b, x, y)),
        Gen::G(_, _, a) | Gen::F(_, _, a) => atom_variation(a, x, y),
    }
}

/// True when every temporal operator is applied directly to an atom. The
/// sampled and the dense semantics then agree exactly, because the atoms are
/// linear between samples.
pub fn flat(f: &Gen) -> bool {
    match f {
        Gen::Lin(..) => true,
        Gen::Not(a) => flat(a),
        Gen::And(a, b) | Gen::Or(a, b) => flat(a) && flat(b),
        Gen::G(_, _, a) | Gen::F(_, _, a) => matches!(**a, Gen::Lin(..)),
    }
}

/// Checks `n` random pairs against the dense evaluator. Returns the number
/// of pairs that fell under the exact case.
pub fn check_random_pairs(seed: u64, n: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut exact = 0;
    while checked < n {
        let f = random_formula(&mut rng, 3);
        if f.steps() >= SAMPLES {
            continue;
        }
        let (x, y) = (random_walk(&mut rng), random_walk(&mut rng));
        let tr = trace(&x, &y);
        let parsed = hyrepair::stl::parse(&f.source()).map_err(|e| format!("{}: {e}", f.source()))?;
        let got = hyrepair::stl::robustness(&parsed, &tr).map_err(|e| e.to_string())?.value;
        let want = f.dense(&upsample(&x), &upsample(&y))[0];
        let tol = if flat(&f) {
            exact += 1;
            1e-9
        } else {
            1e-9 + f.temporal() as f64 * atom_variation(&f, &x, &y)
        };
        if (got - want).abs() > tol {
            return Err(format!("{}: sampled {got}, dense {want}, tol {tol}", f.source()));
        }
        checked += 1;
    }
    Ok(exact)
}

/// Checks De Morgan and the temporal dualities bit for bit on random
/// formulas and traces. Returns the number of identities checked.
pub fn check_dualities(seed: u64, n: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for _ in 0..n {
        let (p, q) = (random_formula(&mut rng, 2), random_formula(&mut rng, 2));
        if p.steps() + 8 >= SAMPLES || q.steps() + 8 >= SAMPLES {
            continue;
        }
        let tr = trace(&random_walk(&mut rng), &random_walk(&mut rng));
        let (ps, qs) = (p.source(), q.source());
        let pairs = [
            (format!("not (({ps}) and ({qs}))"), format!("(not ({ps})) or (not ({qs}))")),
            (format!("not (({ps}) or ({qs}))"), format!("(not ({ps})) and (not ({qs}))")),
            (format!("not (G[0.2, 0.8] ({ps}))"), format!("F[0.2, 0.8] (not ({ps}))")),
            (format!("not (F[0, 0.5] ({ps}))"), format!("G[0, 0.5] (not ({ps}))")),
            (format!("({ps}) => ({qs})"), format!("(not ({ps})) or ({qs})")),
        ];
        for (l, r) in pairs {
            let rho = |s: &str| hyrepair::stl::robustness(&hyrepair::stl::parse(s).unwrap(), &tr).unwrap().value;
            let (a, b) = (rho(&l), rho(&r));
            if a.to_bits() != b.to_bits() {
                return Err(format!("{l} gives {a} but {r} gives {b}"));
            }
            count += 1;
        }
    }
    Ok(count)
}

//! CMA-ES on the unit cube. Samples are clamped to `[0, 1]^n`, and the
//! clamped points are the ones fed back into the update.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SIGMA0: f64 = 0.3;

pub(crate) struct Cmaes {
    n: usize,
    pub lambda: usize,
    mu: usize,
    weights: Vec<f64>,
    mueff: f64,
    cc: f64,
    cs: f64,
    c1: f64,
    cmu: f64,
    damps: f64,
    chi_n: f64,
    mean: DVector<f64>,
    sigma: f64,
    pc: DVector<f64>,
    ps: DVector<f64>,
    c: DMatrix<f64>,
    b: DMatrix<f64>,
    d: DVector<f64>,
    generation: usize,
    /// Best value of each generation since the last restart.
    history: Vec<f64>,
}

impl Cmaes {
    pub fn new(n: usize) -> Self {
        let lambda = 4 + (3.0 * (n as f64).ln()).floor() as usize;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu).map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let nf = n as f64;
        let cc = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
        let cs = (mueff + 2.0) / (nf + mueff + 5.0);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mueff);
        let cmu = (1.0 - c1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0).powi(2) + mueff));
        let damps = 1.0 + 2.0 * (((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        let mut es = Self {
            n,
            lambda,
            mu,
            weights,
            mueff,
            cc,
            cs,
            c1,
            cmu,
            damps,
            chi_n,
            mean: DVector::from_element(n, 0.5),
            sigma: SIGMA0,
            pc: DVector::zeros(n),
            ps: DVector::zeros(n),
            c: DMatrix::identity(n, n),
            b: DMatrix::identity(n, n),
            d: DVector::from_element(n, 1.0),
            generation: 0,
            history: Vec::new(),
        };
        es.restart_at(DVector::from_element(n, 0.5));
        es
    }

    fn restart_at(&mut self, mean: DVector<f64>) {
        let n = self.n;
        self.mean = mean;
        self.sigma = SIGMA0;
        self.pc = DVector::zeros(n);
        self.ps = DVector::zeros(n);
        self.c = DMatrix::identity(n, n);
        self.b = DMatrix::identity(n, n);
        self.d = DVector::from_element(n, 1.0);
        self.generation = 0;
        self.history.clear();
    }

    /// Draws one generation of clamped candidates.
    pub fn ask(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        (0..self.lambda)
            .map(|_| {
                let z = DVector::from_fn(self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
                let y = &self.b * z.component_mul(&self.d);
                let x = &self.mean + y * self.sigma;
                x.iter().map(|v| v.clamp(0.0, 1.0)).collect()
            })
            .collect()
    }

    /// Updates the distribution from a full generation and restarts from a
    /// random mean when the search has stalled.
    pub fn tell(&mut self, xs: &[Vec<f64>], fs: &[f64], rng: &mut ChaCha8Rng) {
        let n = self.n;
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&i, &j| fs[i].total_cmp(&fs[j]).then(i.cmp(&j)));
        let old = self.mean.clone();
        let steps: Vec<DVector<f64>> =
            order[..self.mu].iter().map(|&i| (DVector::from_column_slice(&xs[i]) - &old) / self.sigma).collect();
        let yw = steps.iter().zip(&self.weights).fold(DVector::zeros(n), |acc, (s, w)| acc + s * *w);
        self.mean = &old + &yw * self.sigma;

        let inv_sqrt = &self.b * DMatrix::from_diagonal(&self.d.map(|v| 1.0 / v)) * self.b.transpose();
        self.ps = &self.ps * (1.0 - self.cs) + inv_sqrt * &yw * (self.cs * (2.0 - self.cs) * self.mueff).sqrt();
        let gen = (self.generation + 1) as f64;
        let hsig =
            self.ps.norm() / (1.0 - (1.0 - self.cs).powf(2.0 * gen)).sqrt() / self.chi_n < 1.4 + 2.0 / (n as f64 + 1.0);
        let h = if hsig { 1.0 } else { 0.0 };
        self.pc = &self.pc * (1.0 - self.cc) + &yw * (h * (self.cc * (2.0 - self.cc) * self.mueff).sqrt());

        let rank_mu =
            steps.iter().zip(&self.weights).fold(DMatrix::zeros(n, n), |acc, (s, w)| acc + s * s.transpose() * *w);
        self.c = &self.c * (1.0 - self.c1 - self.cmu)
            + (&self.pc * self.pc.transpose() + &self.c * ((1.0 - h) * self.cc * (2.0 - self.cc))) * self.c1
            + rank_mu * self.cmu;
        self.sigma *= ((self.cs / self.damps) * (self.ps.norm() / self.chi_n - 1.0)).exp();
        self.sigma = self.sigma.min(1.0);

        let c = (&self.c + self.c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c);
        self.b = eig.eigenvectors;
        self.d = eig.eigenvalues.map(|v| v.max(1e-20).sqrt());
        self.generation += 1;
        self.history.push(fs[order[0]]);

        if self.stalled() {
            let mean = DVector::from_fn(n, |_, _| rng.random::<f64>());
            self.restart_at(mean);
        }
    }

    fn stalled(&self) -> bool {
        let dmax = self.d.max();
        if self.sigma * dmax < 1e-8 || dmax / self.d.min() > 1e7 {
            return true;
        }
        let window = 10 + (30 * self.n).div_ceil(self.lambda);
        if self.history.len() > window {
            let recent = &self.history[self.history.len() - window..];
            let before = self.history[..self.history.len() - window].iter().copied().fold(f64::INFINITY, f64::min);
            return recent.iter().all(|&f| f >= before);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn population_size() {
        assert_eq!(Cmaes::new(1).lambda, 4);
        assert_eq!(Cmaes::new(10).lambda, 10);
    }

    #[test]
    fn minimises_a_shifted_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut es = Cmaes::new(4);
        let target = [0.2, 0.9, 0.4, 0.65];
        let f = |x: &[f64]| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let mut best = f64::INFINITY;
        for _ in 0..150 {
            let xs = es.ask(&mut rng);
            let fs: Vec<f64> = xs.iter().map(|x| f(x)).collect();
            best = fs.iter().copied().fold(best, f64::min);
            es.tell(&xs, &fs, &mut rng);
        }
        assert!(best < 1e-8, "{best}");
    }

    #[test]
    fn samples_stay_in_the_cube() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut es = Cmaes::new(3);
        for _ in 0..20 {
            let xs = es.ask(&mut rng);
            assert!(xs.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
            let fs: Vec<f64> = xs.iter().map(|x| -x.iter().sum::<f64>()).collect();
            es.tell(&xs, &fs, &mut rng);
        }
    }
}

use rand::Rng;

/// Uniform sample from the open Euclidean ball of the given radius in `dim`
/// dimensions, by rejection from the enclosing cube.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 < 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

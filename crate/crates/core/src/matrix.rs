//! Small dense 3×3 matrix algebra over an arbitrary ring.

use crate::scalar::Ring;

pub type Mat3<S> = [[S; 3]; 3];

pub fn identity<S: Ring>() -> Mat3<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
}

pub fn map<S, T>(m: &Mat3<S>, f: impl Fn(&S) -> T) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| f(&m[i][j])))
}

pub fn mul<S: Ring>(a: &Mat3<S>, b: &Mat3<S>) -> Mat3<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(S::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone())
        })
    })
}

pub fn transpose<S: Clone>(a: &Mat3<S>) -> Mat3<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn scale<S: Ring>(a: &Mat3<S>, k: &S) -> Mat3<S> {
    map(a, |x| x.clone() * k.clone())
}

/// Row vector times matrix, `v·M`.
pub fn row_mul<S: Ring>(v: &[S; 3], m: &Mat3<S>) -> [S; 3] {
    std::array::from_fn(|j| (0..3).fold(S::zero(), |acc, i| acc + v[i].clone() * m[i][j].clone()))
}

/// `u·G·vᵀ`.
pub fn bilinear<S: Ring>(u: &[S; 3], g: &Mat3<S>, v: &[S; 3]) -> S {
    let ug = row_mul(u, g);
    (0..3).fold(S::zero(), |acc, i| acc + ug[i].clone() * v[i].clone())
}

fn minor<S: Ring>(a: &Mat3<S>, i: usize, j: usize) -> S {
    let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
    let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
    a[r[0]][c[0]].clone() * a[r[1]][c[1]].clone() - a[r[0]][c[1]].clone() * a[r[1]][c[0]].clone()
}

pub fn det<S: Ring>(a: &Mat3<S>) -> S {
    a[0][0].clone() * minor(a, 0, 0) - a[0][1].clone() * minor(a, 0, 1)
        + a[0][2].clone() * minor(a, 0, 2)
}

/// The adjugate; equals the inverse when `det(a) = 1`.
pub fn adjugate<S: Ring>(a: &Mat3<S>) -> Mat3<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let m = minor(a, j, i);
            if (i + j) % 2 == 0 {
                m
            } else {
                S::zero() - m
            }
        })
    })
}

pub fn is_symmetric<S: Ring>(a: &Mat3<S>) -> bool {
    (0..3).all(|i| (0..3).all(|j| a[i][j] == a[j][i]))
}

/// Leading principal minors `d1, d2, d3`.
pub fn leading_minors<S: Ring>(a: &Mat3<S>) -> [S; 3] {
    let d1 = a[0][0].clone();
    let d2 = a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone();
    [d1, d2, det(a)]
}

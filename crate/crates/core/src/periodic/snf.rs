use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exact::IntMatrix2;

/// Smith normal form `P M Q = diag(d1, d2)` with `d1 | d2`, `d1, d2 >= 0`,
/// and `P`, `Q` unimodular.
#[derive(Clone, Debug)]
pub struct Smith {
    pub p: IntMatrix2,
    pub q: IntMatrix2,
    pub d1: BigInt,
    pub d2: BigInt,
}

fn get(m: &IntMatrix2, i: usize, j: usize) -> &BigInt {
    match (i, j) {
        (0, 0) => &m.a,
        (0, 1) => &m.b,
        (1, 0) => &m.c,
        _ => &m.d,
    }
}

fn swap_rows(m: &mut IntMatrix2) {
    std::mem::swap(&mut m.a, &mut m.c);
    std::mem::swap(&mut m.b, &mut m.d);
}

fn swap_cols(m: &mut IntMatrix2) {
    std::mem::swap(&mut m.a, &mut m.b);
    std::mem::swap(&mut m.c, &mut m.d);
}

/// row1 -= k * row0
fn row_sub(m: &mut IntMatrix2, k: &BigInt) {
    m.c -= k * &m.a;
    m.d -= k * &m.b;
}

/// col1 -= k * col0
fn col_sub(m: &mut IntMatrix2, k: &BigInt) {
    m.b -= k * &m.a;
    m.d -= k * &m.c;
}

/// row0 += row1
fn row_add_up(m: &mut IntMatrix2) {
    m.a += &m.c;
    m.b += &m.d;
}

pub fn smith(m: &IntMatrix2) -> Smith {
    let mut work = m.clone();
    let mut p = IntMatrix2::identity();
    let mut q = IntMatrix2::identity();
    loop {
        // pivot: smallest nonzero |entry| to (0,0)
        let mut best: Option<(usize, usize)> = None;
        for i in 0..2 {
            for j in 0..2 {
                let v = get(&work, i, j);
                if v.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| v.abs() < get(&work, bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        if bi == 1 {
            swap_rows(&mut work);
            swap_rows(&mut p);
        }
        if bj == 1 {
            swap_cols(&mut work);
            // column ops act on Q from the right: swap Q's columns
            swap_cols(&mut q);
        }
        let k = work.c.div_floor(&work.a);
        row_sub(&mut work, &k);
        row_sub(&mut p, &k);
        let k = work.b.div_floor(&work.a);
        col_sub(&mut work, &k);
        col_sub(&mut q, &k);
        if !work.b.is_zero() || !work.c.is_zero() {
            continue;
        }
        if !work.d.is_zero() && !(&work.d % &work.a).is_zero() {
            row_add_up(&mut work);
            row_add_up(&mut p);
            continue;
        }
        break;
    }
    if work.a.is_negative() {
        work.a = -&work.a;
        p.a = -&p.a;
        p.b = -&p.b;
    }
    if work.d.is_negative() {
        work.d = -&work.d;
        p.c = -&p.c;
        p.d = -&p.d;
    }
    Smith { p, q, d1: work.a, d2: work.d }
}

use super::tables::bitrev7;
use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QI: i64 = Q as i64;

fn modq(x: i64) -> i64 {
    x.rem_euclid(QI)
}

fn pow_mod(b: i64, mut e: u64) -> i64 {
    let (mut acc, mut b) = (1i64, modq(b));
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % QI;
        }
        b = b * b % QI;
        e >>= 1;
    }
    acc
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_poly(r: &mut impl Rng, bound: i16) -> Poly {
    Poly::from_coeffs(core::array::from_fn(|_| r.gen_range(-bound + 1..bound)))
}

fn backends() -> Vec<Backend> {
    let mut v = vec![Backend::scalar()];
    if let Ok(b) = Backend::vector() {
        v.push(b);
    }
    v
}

/// f mod (x^2 - g_r) for every residue r, evaluated directly.
fn residue_oracle(f: &Poly) -> Vec<(i64, i64)> {
    (0..128)
        .map(|r| {
            let g = pow_mod(17, 2 * bitrev7(r) as u64 + 1);
            let (mut c0, mut c1, mut gp) = (0i64, 0i64, 1i64);
            for j in 0..128 {
                c0 = modq(c0 + f.coeffs[2 * j] as i64 * gp);
                c1 = modq(c1 + f.coeffs[2 * j + 1] as i64 * gp);
                gp = gp * g % QI;
            }
            (c0, c1)
        })
        .collect()
}

fn schoolbook(a: &Poly, b: &Poly) -> Poly {
    let mut acc = [0i64; 2 * N];
    for i in 0..N {
        for j in 0..N {
            acc[i + j] += a.coeffs[i] as i64 * b.coeffs[j] as i64;
        }
    }
    Poly::from_coeffs(core::array::from_fn(|i| modq(acc[i] - acc[i + N]) as i16))
}

#[test]
fn barrett_exhaustive() {
    let (mut lo, mut hi) = (i16::MAX, i16::MIN);
    for a in i16::MIN..=i16::MAX {
        let r = barrett_reduce(a);
        assert_eq!(modq(r as i64), modq(a as i64), "a = {a}");
        lo = lo.min(r);
        hi = hi.max(r);
    }
    // the output range the oracle observes is exactly [0, q]
    assert_eq!((lo, hi), (0, Q));
    assert_eq!(barrett_reduce(0), 0);
    assert_eq!(barrett_reduce(Q), 0);
}

#[test]
fn montgomery_sampled() {
    let rinv = pow_mod(65536, (QI - 2) as u64);
    let bound = QI << 15;
    let mut r = rng(1);
    for _ in 0..1_000_000 {
        let a = r.gen_range(-bound..bound);
        let m = montgomery_reduce(a as i32);
        assert!((m as i64).abs() < QI);
        assert_eq!(modq(m as i64), modq(a * rinv));
    }
    assert_eq!(montgomery_reduce(0), 0);
    for c in [1i64, 2, QI - 1] {
        assert_eq!(modq(montgomery_reduce((c << 16) as i32) as i64), c);
    }
}

#[test]
fn fqmul_twiddle_matches_fqmul() {
    let mut r = rng(2);
    for _ in 0..100_000 {
        let x: i16 = r.gen();
        let z: i16 = r.gen_range(-(Q / 2)..=Q / 2);
        assert_eq!(fqmul_twiddle(x, Twiddle::new(z)), fqmul(x, z));
    }
}

#[test]
fn canonical_range() {
    for a in i16::MIN..=i16::MAX {
        let c = canonical(a);
        assert!((0..Q).contains(&c));
        assert_eq!(modq(c as i64), modq(a as i64));
    }
}

#[test]
fn ntt_zero_and_constant() {
    for b in backends() {
        assert_eq!(b.ntt(&Poly::zero()).to_bit_reversed(), [0; N]);
        for c in [1i16, 7, -5, Q - 1] {
            let mut f = Poly::zero();
            f.coeffs[0] = c;
            let fh = b.ntt(&f).canonical();
            for r in 0..128 {
                assert_eq!(fh.residue(r), (modq(c as i64) as i16, 0));
            }
        }
    }
}

#[test]
fn ntt_matches_residue_oracle() {
    let mut r = rng(3);
    for _ in 0..50 {
        let f = random_poly(&mut r, Q);
        let want = residue_oracle(&f);
        for b in backends() {
            let got = b.ntt(&f);
            for (i, &w) in want.iter().enumerate() {
                let (c0, c1) = got.residue(i);
                assert_eq!((modq(c0 as i64), modq(c1 as i64)), w);
                assert!((c0 as i32).abs() < 8 * Q as i32 && (c1 as i32).abs() < 8 * Q as i32);
            }
        }
    }
}

#[test]
fn intt_inverts_ntt() {
    let mut r = rng(4);
    for _ in 0..10_000 {
        let f = random_poly(&mut r, Q);
        for b in backends() {
            let back = b.intt(&b.ntt(&f));
            assert!(back.coeffs.iter().all(|c| c.abs() < Q));
            assert!(back.congruent(&f));
        }
    }
    for b in backends() {
        assert_eq!(b.intt(&NttPoly::zero(b.ntt_layout())).coeffs, [0; N]);
    }
}

#[test]
fn ntt_inverts_intt() {
    let mut r = rng(5);
    for _ in 0..2_000 {
        let g = NttPoly::from_bit_reversed(random_poly(&mut r, Q).coeffs);
        for b in backends() {
            let back = b.ntt(&b.intt(&g));
            assert_eq!(back.canonical(), g.canonical());
        }
    }
}

#[test]
fn ring_mul_identities() {
    let mut r = rng(6);
    let mut one = Poly::zero();
    one.coeffs[0] = 1;
    let mut x = Poly::zero();
    x.coeffs[1] = 1;
    let mut x2 = Poly::zero();
    x2.coeffs[2] = 1;
    for b in backends() {
        for _ in 0..20 {
            let f = random_poly(&mut r, Q);
            assert!(b.ring_mul(&f, &one).congruent(&f));
        }
        assert!(b.ring_mul(&x, &x).congruent(&x2));
    }
}

#[test]
fn ring_mul_matches_schoolbook() {
    let mut r = rng(7);
    let half = (Q - 1) / 2;
    let mut edges = vec![
        Poly::from_coeffs([Q - 1; N]),
        Poly::from_coeffs([-(Q - 1); N]),
        Poly::from_coeffs(core::array::from_fn(|i| if i % 2 == 0 { half } else { -half })),
        Poly::from_coeffs(core::array::from_fn(|i| if i % 3 == 0 { -(Q - 1) } else { Q - 1 })),
    ];
    // noise-sized operands, as in keygen and encryption
    for eta in [2i16, 3] {
        edges.push(Poly::from_coeffs(core::array::from_fn(|i| if i % 2 == 0 { eta } else { -eta })));
    }
    let mut pairs: Vec<(Poly, Poly)> = Vec::new();
    for a in &edges {
        for c in &edges {
            pairs.push((*a, *c));
        }
    }
    for _ in 0..1_000 {
        pairs.push((random_poly(&mut r, Q), random_poly(&mut r, Q)));
    }
    for (a, c) in &pairs {
        let want = schoolbook(a, c);
        for b in backends() {
            let got = b.ring_mul(a, c);
            assert!(got.coeffs.iter().all(|v| v.abs() < Q));
            assert_eq!(got.canonical(), want);
        }
    }
}

#[test]
fn backends_bit_identical() {
    let Ok(v) = Backend::vector() else {
        eprintln!("skipping: no AVX-512BW on this host");
        return;
    };
    let s = Backend::scalar();
    let mut r = rng(8);
    for _ in 0..10_000 {
        let f = random_poly(&mut r, Q);
        let g = random_poly(&mut r, Q);
        let (fs, fv) = (s.ntt(&f), v.ntt(&f));
        assert_eq!(fs.raw(), &fv.to_bit_reversed());
        let gs = s.ntt(&g);
        assert_eq!(s.basemul(&fs, &gs), v.basemul(&fv, &v.ntt(&g)));
        let wide = NttPoly::from_bit_reversed(core::array::from_fn(|_| r.gen()));
        assert_eq!(s.intt(&wide), v.intt(&wide));
        let raw: [i16; N] = core::array::from_fn(|_| r.gen());
        for op in [PolyOp::Reduce, PolyOp::ToMont, PolyOp::FromMont] {
            assert_eq!(s.poly_arith(op, &raw, None), v.poly_arith(op, &raw, None));
        }
        for op in [PolyOp::Add, PolyOp::Sub] {
            assert_eq!(
                s.poly_arith(op, &f.coeffs, Some(&g.coeffs)),
                v.poly_arith(op, &f.coeffs, Some(&g.coeffs))
            );
        }
    }
}

#[test]
fn transforms_stay_in_16_bits() {
    let mut r = rng(9);
    let mut inputs = vec![
        [Q - 1; N],
        [-(Q - 1); N],
        core::array::from_fn(|i| if i % 2 == 0 { Q - 1 } else { -(Q - 1) }),
    ];
    for _ in 0..200 {
        inputs.push(random_poly(&mut r, Q).coeffs);
    }
    for f in &inputs {
        let wide = shadow::ntt(f).expect("forward overflow");
        assert_eq!(wide, Backend::scalar().ntt(&Poly::from_coeffs(*f)).to_bit_reversed());
        assert!(wide.iter().all(|c| (*c as i32).abs() < 8 * Q as i32));
    }
    let mut ntt_inputs = vec![[i16::MAX; N], [i16::MIN; N], [Q; N], [0; N]];
    for _ in 0..200 {
        ntt_inputs.push(core::array::from_fn(|_| r.gen()));
    }
    for g in &ntt_inputs {
        let wide = shadow::intt(g).expect("inverse overflow");
        assert_eq!(wide, Backend::scalar().intt(&NttPoly::from_bit_reversed(*g)).coeffs);
    }
}

#[test]
fn intt_schedule_is_tight() {
    // dropping any one reduction layer overflows on worst-case input
    // (every coefficient at q after the initial pass)
    let bound = |skip: usize| -> bool {
        let mut b = [Q as i32; N];
        let mut len = 2;
        let mut layer = 1;
        while len <= 128 {
            for j in 0..N {
                if j & len == 0 {
                    let s = b[j] + b[j + len];
                    if s > i16::MAX as i32 {
                        return false;
                    }
                    b[j] = s;
                    b[j + len] = Q as i32 - 1;
                }
            }
            if layer != skip {
                for (i, x) in b.iter_mut().enumerate() {
                    if scalar::lazy_reduce(layer, i) {
                        *x = Q as i32;
                    }
                }
            }
            len <<= 1;
            layer += 1;
        }
        true
    };
    assert!(bound(0));
    for skip in 3..=6 {
        assert!(!bound(skip), "layer {skip} reduction is redundant");
    }
}

#[test]
fn poly_arith_examples() {
    let mut r = rng(10);
    for b in backends() {
        let f = random_poly(&mut r, Q);
        assert_eq!(b.add(&f, &Poly::zero()), f);
        assert_eq!(b.reduce(&b.sub(&f, &f)), Poly::zero());
        let m = b.poly_arith(PolyOp::ToMont, &f.coeffs, None).unwrap();
        let back = b.poly_arith(PolyOp::FromMont, &m, None).unwrap();
        assert!(Poly::from_coeffs(back).congruent(&f));
        assert!(matches!(
            b.poly_arith(PolyOp::Add, &f.coeffs, None),
            Err(Error::InvalidArgument(_))
        ));
    }
}

#[test]
fn layouts_interoperate() {
    let Ok(v) = Backend::vector() else { return };
    let s = Backend::scalar();
    let mut r = rng(11);
    let f = random_poly(&mut r, Q);
    let g = random_poly(&mut r, Q);
    // vector-transformed operand fed to the scalar backend and vice versa
    let mixed = s.intt(&s.basemul(&v.ntt(&f), &s.ntt(&g)));
    assert_eq!(mixed, v.ring_mul(&f, &g));
}

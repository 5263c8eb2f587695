use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segspace::geodesic::*;
use segspace::rulings::{ruling_lines_m, segment_in_manifold};
use segspace::segment::{point_to_chart, ChartCoord};
use segspace::{Complex64, Error, PolyPoint, Space, DEFAULT_TOL};

const C: fn(f64, f64) -> Complex64 = Complex64::new;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A curved M(3) geodesic with well-spread `r` and nonzero `k₁`.
fn curved_beta() -> GeodesicTrajectory {
    integrate_geodesic(Space::M, &[0.9, 0.2, 0.3], &[0.4, -0.6, 1.1], &IntegrateOptions::default()).unwrap()
}

/// Straight line `z = z₀`, `rⱼ = rⱼ⁰ + t ṙⱼ` in M(n) sampled exactly.
fn straight_m(n: usize, t_final: f64, dt: f64) -> GeodesicTrajectory {
    let mut q = vec![0.7, -0.4];
    q.extend((3..=n).map(|j| 0.1 * j as f64));
    let mut v = vec![0.0, 0.0];
    v.extend((3..=n).map(|j| 0.5 - 0.2 * j as f64));
    integrate_geodesic(Space::M, &q, &v, &IntegrateOptions::new(dt, t_final)).unwrap()
}

#[test]
fn metric_is_positive_definite_on_random_chart_points() {
    let mut r = rng(11);
    for trial in 0..10_000 {
        let n = 3 + trial % 5;
        let space = if trial % 2 == 0 { Space::M } else { Space::L };
        let (q, _) = random_initial_data(space, n, 1.0, &mut r);
        let c = ChartCoord::new(space, 2, q).unwrap();
        let g = induced_metric(&c).unwrap();
        assert_eq!(g.g, g.g.transpose());
        assert!(g.is_positive_definite(), "{c:?}");
    }
}

#[test]
fn straight_line_and_its_residuals() {
    let traj = integrate_geodesic(Space::M, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &IntegrateOptions::default()).unwrap();
    let last = traj.ambient_point(traj.len() - 1);
    assert_eq!(last[0], C(0.0, 0.0));
    assert!((last[2] - C(1.0, 0.0)).norm() < 1e-12);
    assert!(max_second_difference(&traj) < 1e-9);
    assert!(residuals_m(&traj).summary().max() <= 1e-12);
    assert!(residuals_m(&straight_m(6, 1.0, 1e-3)).summary().max() <= 1e-12);
}

fn chart_velocity(line_point: &PolyPoint, dir: &[Complex64]) -> Vec<f64> {
    let z = line_point[1];
    let dz = dir[1];
    let mut v = vec![dz.re, dz.im];
    for m in 2..line_point.n() {
        v.push(((dir[m] * z - line_point[m] * dz) / (z * z)).re);
    }
    v
}

#[test]
fn ruling_lines_are_fixed_points_of_the_integrator() {
    let mut r = rng(5);
    let mut checked = 0;
    for _ in 0..20 {
        let n = r.random_range(3..=6);
        let (q, _) = random_initial_data(Space::M, n, 1.0, &mut r);
        let z = segspace::segment::chart_to_point(&ChartCoord::new(Space::M, 2, q.clone()).unwrap());
        for line in ruling_lines_m(&z, DEFAULT_TOL).unwrap() {
            // the line must stay well inside U₂ on [0, 1]
            let z2 = |t: f64| line.at(t)[1].norm();
            if (0..=100).any(|i| z2(i as f64 / 100.0) < 0.2) {
                continue;
            }
            let v0 = chart_velocity(&line.point, &line.direction);
            let traj = integrate_geodesic(Space::M, &q, &v0, &IntegrateOptions::default()).unwrap();
            assert_eq!(traj.termination, Termination::Completed);
            for (i, t) in traj.times.iter().enumerate().step_by(50) {
                let exact = point_to_chart(&line.at(*t), Space::M, 2, DEFAULT_TOL).unwrap();
                let err = exact.coords.iter().zip(&traj.positions[i]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err <= 1e-10, "deviation {err:e} at t = {t}");
            }
            checked += 1;
        }
    }
    assert!(checked > 40, "only {checked} lines checked");
}

#[test]
fn generic_geodesics_satisfy_the_conditions() {
    let mut r = rng(7);
    for n in 3..=7 {
        let traj = loop {
            let (q, v) = random_initial_data(Space::M, n, 1.0, &mut r);
            let traj = integrate_geodesic(Space::M, &q, &v, &IntegrateOptions::default()).unwrap();
            // geodesics through the edge of U₂ halt early; draw again
            if traj.termination == Termination::Completed {
                break traj;
            }
        };
        let s = residuals_m(&traj).summary();
        assert!(s.max() <= 1e-8, "n = {n}: {s:?}");
        assert!(s.orthogonality <= 1e-10);
        assert!(monotonicity(&traj, 1e-12).holds(1e-8), "{:?}", monotonicity(&traj, 1e-12));

        let (q, v) = random_initial_data(Space::L, n, 1.0, &mut r);
        let traj = integrate_geodesic(Space::L, &q, &v, &IntegrateOptions::default()).unwrap();
        let s = residuals_l(&traj).summary();
        assert!(s.max() <= 1e-8, "L({n}): {s:?}");
    }
}

#[test]
fn monotonicity_distinguishes_constant_coordinates() {
    let traj = integrate_geodesic(
        Space::M,
        &[0.8, 0.5, 0.2, -0.3, 0.6],
        &[0.3, -0.2, 0.0, 0.7, -0.4],
        &IntegrateOptions::default(),
    )
    .unwrap();
    let rep = monotonicity(&traj, 1e-12);
    assert_eq!(rep.behaviour, ["constant", "increasing", "decreasing"]);
    assert!(rep.max_pair_drift <= 1e-8);
}

#[test]
fn circle_in_chart_coordinates_is_not_a_geodesic() {
    let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
    let positions = times.iter().map(|t| vec![t.cos(), t.sin(), 0.5]).collect();
    let velocities = times.iter().map(|t| vec![-t.sin(), t.cos(), 0.0]).collect();
    let accelerations = times.iter().map(|t| vec![-t.cos(), -t.sin(), 0.0]).collect();
    let traj = GeodesicTrajectory::from_samples(Space::M, times, positions, velocities, accelerations).unwrap();
    assert!(residuals_m(&traj).summary().z_orthogonality >= 1e-2);
}

#[test]
fn quadratic_diagonal_part_violates_condition_iv() {
    let gamma = curved_beta();
    let a = C(0.3, -0.1);
    let lifted = lift_m_to_l(&gamma, &[C(0.0, 0.0), C(0.0, 0.0), a], 1e-7).unwrap();
    let res = residuals_l(&lifted.trajectory).summary();
    assert!(res.cond_iv >= 1e-3);
    assert!(!lifted.verdict && !lifted.residuals_pass);
}

#[test]
fn conserved_quantities_converge_at_fourth_order() {
    let mut r = rng(3);
    let mut ratios = Vec::new();
    let mut completed = 0;
    while ratios.len() < 12 {
        let n = 3 + completed % 3;
        let (q, v) = random_initial_data(Space::M, n, 3.0, &mut r);
        let (coarse, fine, ratio) = richardson_drift(Space::M, &q, &v, &IntegrateOptions::default()).unwrap();
        if coarse.termination != Termination::Completed || fine.termination != Termination::Completed {
            continue;
        }
        completed += 1;
        assert!(coarse.drift().max_for(Space::M) <= 1e-7);
        if fine.drift().max_for(Space::M) > DRIFT_FLOOR {
            ratios.push(ratio);
        }
    }
    assert!(ratios.iter().all(|r| (12.0..=20.0).contains(r)), "{ratios:?}");
}

#[test]
fn balanced_lifts_are_geodesics() {
    let beta = curved_beta();
    let s2 = 2f64.sqrt();
    let h = 0.5f64.sqrt();
    // A₁ = {3} with a₃ = 1 balanced by equal amplitudes on A₂ = {4, …, n}
    let mut specs: Vec<LiftSpec> = (4..=8)
        .map(|n| {
            let a = (2.0 / (n - 3) as f64).sqrt();
            let mut amps = vec![1.0];
            amps.extend(std::iter::repeat_n(a, n - 3));
            let mut shapes = vec![Shape::Constant];
            shapes.extend(std::iter::repeat_n(Shape::FollowsR, n - 3));
            LiftSpec::new(amps, shapes).unwrap()
        })
        .collect();
    specs.push(LiftSpec::new(vec![h, -h], vec![Shape::FollowsR, Shape::FollowsR]).unwrap());
    for spec in &specs {
        assert!(check_lift_condition(spec), "{spec:?}");
        let gamma = lift_m3_to_mn(&beta, spec, 1e-7).unwrap();
        assert_eq!(gamma.n(), spec.n());
        assert!(residuals_m(&gamma).summary().max() <= 1e-7);
    }

    let unbalanced = LiftSpec::new(vec![1.1, s2], vec![Shape::Constant, Shape::FollowsR]).unwrap();
    assert!(!check_lift_condition(&unbalanced));
    let gamma = lift_m3_to_mn(&beta, &unbalanced, 1e-7).unwrap();
    assert!(residuals_m(&gamma).summary().angular >= 1e-3);
}

#[test]
fn lift_rejects_straight_and_non_geodesic_bases() {
    let spec = LiftSpec::new(vec![1.0, 2f64.sqrt()], vec![Shape::Constant, Shape::FollowsR]).unwrap();
    assert_eq!(lift_m3_to_mn(&straight_m(3, 1.0, 1e-3), &spec, 1e-7).unwrap_err(), Error::StraightLine);

    let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
    let circle = GeodesicTrajectory::from_samples(
        Space::M,
        times.clone(),
        times.iter().map(|t| vec![t.cos(), t.sin(), *t]).collect(),
        times.iter().map(|t| vec![-t.sin(), t.cos(), 1.0]).collect(),
        times.iter().map(|t| vec![-t.cos(), -t.sin(), 0.0]).collect(),
    )
    .unwrap();
    assert!(matches!(lift_m3_to_mn(&circle, &spec, 1e-7), Err(Error::NotGeodesic { .. })));
    assert!(matches!(lift_m3_to_mn(&straight_m(4, 1.0, 1e-2), &spec, 1e-7), Err(Error::InvalidArgument(_))));
}

#[test]
fn lift_to_l_examples() {
    let line = straight_m(5, 1.0, 1e-3);
    let affine = [C(0.2, 0.1), C(-0.5, 0.3)];
    let out = lift_m_to_l(&line, &affine, 1e-7).unwrap();
    assert!(out.verdict && out.agrees);
    assert!(out.residuals.max() <= 1e-12);

    let out = lift_m_to_l(&line, &[C(0.2, 0.1), C(-0.5, 0.3), C(0.1, 0.0)], 1e-7).unwrap();
    assert!(!out.verdict && out.agrees);
}

#[test]
fn lift_to_l_criterion_matches_residuals() {
    let special =
        LiftSpec::new(vec![-1.0, 1.0, -1.0], vec![Shape::Constant, Shape::FollowsR, Shape::FollowsR]).unwrap();
    let mut r = rng(2024);
    let mut verdicts = [0usize; 2];
    for trial in 0..100 {
        let gamma = match trial % 4 {
            // curved geodesic with ⟨⟨γ″, 1⃗⟩⟩ ≡ ⟨⟨γ″, i⃗⟩⟩ ≡ 0
            0 | 1 => loop {
                let (q, v) = random_initial_data(Space::M, 3, 1.0, &mut r);
                let beta = integrate_geodesic(Space::M, &q, &v, &IntegrateOptions::default()).unwrap();
                if let Ok(g) = lift_m3_to_mn(&beta, &special, 1e-7) {
                    break g;
                }
            },
            _ => {
                let n = r.random_range(3..=6);
                let (q, v) = random_initial_data(Space::M, n, 1.0, &mut r);
                integrate_geodesic(Space::M, &q, &v, &IntegrateOptions::default()).unwrap()
            }
        };
        let mut lambda = vec![
            C(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)),
            C(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)),
        ];
        if trial % 2 == 1 {
            lambda.push(C(r.random_range(0.1..1.0), r.random_range(-1.0..1.0)));
        }
        let out = lift_m_to_l(&gamma, &lambda, 1e-7).unwrap();
        assert!(out.agrees, "trial {trial}: {out:?}");
        verdicts[out.verdict as usize] += 1;
    }
    assert!(verdicts[0] > 0 && verdicts[1] > 0, "{verdicts:?}");
}

#[test]
fn survey_classifies_straight_and_curved() {
    // velocity along the C*-ruling (1 + it)Z
    let q = [0.6, 0.8, 0.5, -1.0];
    let ruling = integrate_geodesic(Space::M, &q, &[-0.8, 0.6, 0.0, 0.0], &IntegrateOptions::default()).unwrap();
    assert_eq!(classify(&ruling, STRAIGHT_TOL), Classification::Straight);

    let report = geodesic_survey(Space::M, 4, 8, 1.0, 1e-2, 99).unwrap();
    assert_eq!(report.curved, 8);
    assert!(report.max_drift <= 1e-6);
    let (lo, hi) = (report.min_drift_ratio.unwrap(), report.max_drift_ratio.unwrap());
    assert!((12.0..=20.0).contains(&lo) && (12.0..=20.0).contains(&hi), "{lo} {hi}");

    let again = geodesic_survey(Space::M, 4, 8, 1.0, 1e-2, 99).unwrap();
    assert_eq!(again.to_json(), report.to_json());
    let t = &report.trials[3];
    let (q, v) = random_initial_data(Space::M, 4, 1.0, &mut rng(t.seed));
    assert_eq!((q, v), (t.position.clone(), t.velocity.clone()));
}

#[test]
fn m_is_not_geodesically_convex() {
    let mut r = rng(17);
    for _ in 0..200 {
        let n = r.random_range(3..=8);
        let (q, _) = random_initial_data(Space::M, n, 1.0, &mut r);
        let z = segspace::segment::chart_to_point(&ChartCoord::new(Space::M, 2, q).unwrap());
        assert!(!segment_in_manifold(&z, &z.scale(C(-1.0, 0.0)), Space::M, DEFAULT_TOL).unwrap());
    }
}

#[test]
fn csv_round_trips_doubles() {
    let (q, v) = random_initial_data(Space::M, 4, 1.0, &mut rng(1));
    let traj = integrate_geodesic(Space::M, &q, &v, &IntegrateOptions::new(1e-3, 0.01)).unwrap();
    let csv = traj.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,y,r3,r4,k0,k1,k3,k4"));
    for (i, line) in lines.enumerate() {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], traj.times[i]);
        assert_eq!(&fields[1..5], traj.positions[i].as_slice());
        assert_eq!(fields[5], traj.conserved[i].k0);
    }
}

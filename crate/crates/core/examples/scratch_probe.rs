//! Scratch probe: reverse-engineer the time aggregation of the reference
//! relative errors (temporary).

use ndarray::s;
use rom_core::estimator::LipschitzTable;
use rom_core::integrate::solve_full;
use rom_core::pod::pod;
use rom_core::reduced::{
    build_time_independent_basis, compute_offline_quantities, reconstruct_trajectory, solve_reduced,
};
use rom_core::testcases::{BenchmarkCase, BenchmarkSpec, InitialCondition};

fn main() {
    let paper_cont_e2 = [0.027831, 0.024075, 0.0078461, 0.00021853, 4.8616e-9];
    let paper_cont_einf = [0.76058, 0.95713, 0.26984, 0.0075156, 1.6719e-7];
    let rs = [1usize, 2, 5, 10, 20];

    let spec = BenchmarkSpec::new(BenchmarkCase::Advection1d, 2001)
        .with_initial_condition(InitialCondition::Continuous);
    let (model, grid, _) = spec.build().unwrap();
    let xi = [0.65];
    let full = solve_full(&model, &xi, &grid, model.scheme()).unwrap();
    let weights = vec![grid.dt(); grid.num_nodes()];
    let p = pod(full.states(), &weights, 60).unwrap();
    let empty = LipschitzTable::from_parts(vec![], vec![], vec![]);

    for (i, &r) in rs.iter().enumerate() {
        let rr = r.min(p.achieved);
        let modes = p.modes.slice(s![.., ..rr]).to_owned();
        let basis = build_time_independent_basis(modes, &grid).unwrap();
        let offline = compute_offline_quantities(&basis, &model, None, empty.clone()).unwrap();
        let reduced = solve_reduced(&offline, &model, &xi).unwrap();
        let rec = reconstruct_trajectory(&basis, &reduced, &grid).unwrap();

        let nodes = grid.num_nodes();
        let mut dn: Vec<f64> = Vec::with_capacity(nodes);
        let mut un: Vec<f64> = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let diff = &rec.state(k) - &full.state(k);
            dn.push(diff.dot(&diff).sqrt());
            let u = full.state(k);
            un.push(u.dot(&u).sqrt());
        }
        let l2 = (dn.iter().map(|v| v * v).sum::<f64>() / un.iter().map(|v| v * v).sum::<f64>())
            .sqrt();
        let mean_ratio = dn.iter().zip(&un).map(|(d, u)| d / u).sum::<f64>() / nodes as f64;
        let sum_ratio = dn.iter().sum::<f64>() / un.iter().sum::<f64>();
        let final_rel = dn[nodes - 1] / un[nodes - 1];
        let einf = dn
            .iter()
            .zip(&un)
            .map(|(d, _)| *d)
            .fold(0.0_f64, f64::max)
            / un.iter().cloned().fold(0.0_f64, f64::max);
        // l2 of absolute error normalized by max_t ||u||
        let l2_over_linf = (grid.dt() * dn.iter().map(|v| v * v).sum::<f64>()).sqrt()
            / un.iter().cloned().fold(0.0_f64, f64::max);
        println!(
            "r={r:2}: paperE2={:.4e} | l2={l2:.4e} meanratio={mean_ratio:.4e} sumratio={sum_ratio:.4e} final={final_rel:.4e} l2/linf={l2_over_linf:.4e} | einf mine={einf:.4e} paper={:.4e}",
            paper_cont_e2[i], paper_cont_einf[i]
        );
    }
}

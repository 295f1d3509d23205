use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use geomeas::sampling::{sample_lambda, sampling_config};
use geomeas::{seesaw, PureState, SeeSawConfig, Shape};

fn workloads(c: &mut Criterion, label: &str, run: &dyn Fn(&mut (dyn FnMut() + Send))) {
    let psi = PureState::haar_random(Shape::uniform(5, 2).unwrap(), 1);
    let cfg = SeeSawConfig::default().with_restarts(16);
    c.bench_function(&format!("seesaw_5q_16_restarts/{label}"), |b| {
        b.iter(|| {
            let mut out = None;
            run(&mut || out = Some(seesaw(black_box(&psi), &cfg).unwrap()));
            out
        })
    });
    let scfg = sampling_config().with_restarts(4);
    c.bench_function(&format!("sample_4q_16_states/{label}"), |b| {
        b.iter(|| {
            let mut out = None;
            run(&mut || out = Some(sample_lambda(4, 16, black_box(7), &scfg).unwrap()));
            out
        })
    });
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let pool = |n: usize| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let single = pool(1);
    let all = pool(0);
    workloads(c, "rayon_1_thread", &|f| single.install(f));
    workloads(c, &format!("rayon_default_pool_{}", all.current_num_threads()), &|f| all.install(f));
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    workloads(c, "sequential", &|f| f());
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench
}
criterion_main!(benches);

mod common;

use backchase::analysis::InverseType;
use backchase::pipeline::roundtrip;
use backchase::smo::{FunctionRegistry, SmoClass, SmoKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{catalog_case, resource_settings};

#[test]
fn every_operator_meets_its_prediction() {
    let reg = FunctionRegistry::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let settings = resource_settings();
    let mut failures = Vec::new();
    for kind in SmoKind::ALL {
        for round in 0..40 {
            let case = catalog_case(kind, &mut rng);
            let i = case.instance(&mut rng, 12);
            let r = settings[round % settings.len()];
            let script = backchase::smo::Script::new(vec![case.spec.clone()]);
            let (_, back) = roundtrip(&i, &script, r, &reg).unwrap_or_else(|e| panic!("{kind} {r}: {e}"));
            let s = &back.steps[0];
            let achieved = s.classification.inverse_type;
            if achieved < s.predicted || (kind.classes() == [SmoClass::I] && achieved != InverseType::Exact) {
                failures.push(format!("{kind} {r} [{}]: achieved {achieved}, predicted {}", s.resources, s.predicted));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

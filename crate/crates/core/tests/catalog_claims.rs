use std::collections::BTreeMap;

use twilled::catalog;

#[test]
fn every_default_claim_matches() {
    for (id, _) in catalog::list() {
        let entry = catalog::build(id, &BTreeMap::new()).unwrap();
        for claim in &entry.claims {
            let out = entry
                .verify_claim(claim)
                .unwrap_or_else(|e| panic!("{id} {claim:?}: {e}"));
            let failing: Vec<_> = out.checks.iter().filter(|c| !c.holds).map(|c| &c.name).collect();
            assert_eq!(
                out.holds, claim.expect,
                "{id} {} {:?}: failing {failing:?}",
                claim.identity, claim.op
            );
        }
        for (name, expected, found) in entry.check_classes().unwrap() {
            assert_eq!(expected, found, "{id} {name}");
        }
    }
}

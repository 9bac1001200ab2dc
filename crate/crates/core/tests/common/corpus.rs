//! Golden corpus: formulas in printed normal form with hand-derived labels.

pub const FORMULAS: &[(&str, &str)] = &[
    ("forall a:0. forall c:X. norm(c) <=R norm(c) + 1r", "forall-formula"),
    ("forall a:0. exists b:0 <~ a. forall c:X. b <=0 a", "delta-sentence"),
    ("forall a:0(0(X)). 0 =0 0", "other"),
    ("exists n:0. exists x:X. norm(x) <=R 1/2r", "exists-formula"),
    ("exists b:0 <~ 5. forall c:0. b <=0 c + 5", "skolem-form"),
    ("forall a:0. exists b:0. b =0 a", "other"),
    ("forall x:X. forall y:X. norm(x + y) <=R norm(x) + norm(y)", "forall-formula"),
    ("forall x:X. forall r:0(0). norm(r * x) =R r * norm(x)", "forall-formula"),
    ("0X =X 0X", "forall-formula"),
    ("~(1X =X 0X)", "forall-formula"),
    ("forall n:0. forall x:X(0). exists y:X <~ x(n). forall k:0. norm(y) <=R norm(x(k))", "delta-sentence"),
    ("forall x:X(0). forall k:0. norm(C(x) - x(k)) <=R 8r", "forall-formula"),
    ("exists f:X(0) <~ (\\n:0. 1X). forall k:0. norm(f(k)) <=R 1r", "skolem-form"),
    ("forall a:0. exists b:0 <~ a. exists d:X <~ 1X. forall c:X. b <=0 a & d <~ c", "delta-sentence"),
    ("forall f:X(0). forall g:X(0). f <~ g", "other"),
    ("forall a:0. exists b:0 <~ a + 1. forall c:0. (b <=0 a => c <=0 c) | b =0 a", "delta-sentence"),
    ("forall a:0. forall c:0. exists b:0 <~ a. b <=0 c", "delta-sentence"),
    ("exists b:0 <~ 3. exists d:0 <~ 4. b + d <=0 7", "skolem-form"),
    ("forall a:0. (forall c:0. c <=0 a) => a =0 a", "other"),
    ("exists x:X. forall y:X. norm(x) <=R norm(y)", "other"),
    ("forall h:0(X). h(0X) =0 h(0X)", "forall-formula"),
    ("forall h:0(0(X)). h(\\x:X. 0) =0 0", "other"),
    ("forall a:X(0)(0). exists b:X <~ a(0)(1). forall c:X. norm(b) <=R norm(c) + c_p", "delta-sentence"),
    ("forall a:0. exists b:0 <~ a. b <=0 a & ~(a =0 b) | a <=0 b", "delta-sentence"),
    ("forall a:0. a - 1 <=0 a * a", "forall-formula"),
    ("forall x:X. 2r * x =X x + x", "forall-formula"),
    ("exists B:0(0) <~ (\\a:0. a). forall a:0. forall c:X. B(a) <=0 a", "skolem-form"),
    ("forall n:0. forall x:X. exists y:X <~ x. forall m:0. y =X x", "delta-sentence"),
    ("forall a:0. exists b:0 <~ a. forall c:0(0(X)). b <=0 a", "other"),
    ("forall a:0 <~ 7. forall c:X. a <=0 7", "forall-formula"),
];

/// Types in printed form with (small, admissible, hat).
pub const TYPES: &[(&str, bool, bool, &str)] = &[
    ("0", true, true, "0"),
    ("X", true, true, "0"),
    ("0(0)", true, true, "0(0)"),
    ("X(0)(0)", true, true, "0(0)(0)"),
    ("0(X)", false, true, "0(0)"),
    ("0(0(X))", false, false, "0(0(0))"),
    ("X(X(0))", false, true, "0(0(0))"),
    ("X(0)(X)", false, true, "0(0)(0)"),
    ("0(X(0)(0))(0)", false, true, "0(0(0)(0))(0)"),
    ("X(0(0)(0))", false, true, "0(0(0)(0))"),
    ("X(0(0(0)))", false, false, "0(0(0(0)))"),
];

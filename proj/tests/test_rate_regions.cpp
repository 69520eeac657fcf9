#include "snncrs/rate_regions.hpp"

#include <gtest/gtest.h>

using namespace snncrs;

namespace {

InequalitySystem parse(const std::string& text) { return parse_system(text); }

AtomValuation no_atoms() { return {}; }

InequalitySystem projected_appendix() {
  return fm_eliminate(fm_eliminate(appendix_system(), "R30"), "R31");
}

std::vector<AtomValuation> valuations(std::size_t n, std::uint64_t seed,
                                      std::size_t witnesses = 0) {
  const auto a = appendix_system();
  const auto t = theorem2_system();
  const auto f = fallback_system();
  ValuationSampling s;
  s.count = n;
  s.seed = seed;
  if (witnesses) {
    s.sparse_every = 2;
    s.witnesses_per_kind = witnesses;
  }
  return sample_valuations(atom_union({&a, &t, &f}), s);
}

}  // namespace

TEST(Atoms, CanonicalIds) {
  EXPECT_EQ(make_atom({"X30", "X1"}, {"Y2"}, {"X2"}).id, "I(X1,X30;Y2|X2)");
  EXPECT_EQ(make_atom({"X1"}, {"Y4"}).id, "I(X1;Y4)");
  const Atom a = parse_atom("I(X2,X1;Y4,Yh3|X31,X30)");
  EXPECT_EQ(a.id, "I(X1,X2;Y4,Yh3|X30,X31)");
  EXPECT_THROW(make_atom({"X1"}, {"X1"}), LabelError);
  EXPECT_THROW(parse_atom("I(X1)"), std::invalid_argument);
}

TEST(AppendixSystem, Shape) {
  const auto sys = appendix_system();
  EXPECT_EQ(sys.variables.size(), 3u);
  EXPECT_EQ(sys.atoms.size(), 9u);
  EXPECT_EQ(sys.constraints.size(), 11u);
  const auto& jd7 = sys.at("JD7");
  EXPECT_EQ(jd7.sense, Sense::ge);
  ASSERT_EQ(jd7.atoms.size(), 1u);
  EXPECT_EQ(jd7.atoms.begin()->first, "I(Yh3;Y3|X30,X31)");
  const auto& jd1 = sys.at("JD1");
  EXPECT_EQ(jd1.vars.size(), 1u);
  EXPECT_EQ(jd1.coeff("R"), 1);
  ASSERT_EQ(jd1.atoms.size(), 1u);
  EXPECT_EQ(jd1.atoms.begin()->first, "I(X1;Y2|X2,X30)");
}

TEST(Theorem2System, Shape) {
  const auto sys = theorem2_system();
  EXPECT_EQ(sys.constraints.size(), 6u);
  EXPECT_EQ(sys.variables, std::vector<std::string>{"R"});
  int doubled = 0;
  for (const auto& c : sys.constraints) doubled += c.coeff("R") == 2;
  EXPECT_EQ(doubled, 1);
  EXPECT_FALSE(sys.at("cond").has_variables());
  EXPECT_TRUE(sys.at("jd1") == appendix_system().at("JD1"));
  EXPECT_EQ(theorem2_system(false).constraints.size(), 5u);
}

TEST(FourierMotzkin, HandExample) {
  const auto sys = parse("a: 1*y <= 2\nb: 1*x + -1*y <= 1\nc: 1*y >= 0\n");
  const auto out = fm_eliminate(sys, "y");
  EXPECT_EQ(out.variables, std::vector<std::string>{"x"});
  ASSERT_EQ(out.constraints.size(), 2u);
  EXPECT_EQ(out.constraints[0].coeff("x"), 1);
  EXPECT_EQ(out.constraints[0].constant, 3);
  EXPECT_EQ(out.constraints[0].label, "(a+b)");
  EXPECT_FALSE(out.constraints[1].has_variables());
  EXPECT_EQ(out.constraints[1].constant, 2);
}

TEST(FourierMotzkin, InfeasibleCertificate) {
  const auto out = fm_eliminate(parse("lo: 1*y >= 5\nhi: 1*y <= 3\n"), "y");
  ASSERT_EQ(out.constraints.size(), 1u);
  EXPECT_FALSE(out.constraints[0].has_variables());
  EXPECT_EQ(out.constraints[0].constant, -2);  // 0 <= 3 - 5
  const auto m = max_rate(parse("lo: 1*R >= 5\nhi: 1*R <= 3\n"), no_atoms());
  EXPECT_FALSE(m.feasible);
  EXPECT_EQ(m.value, 0.0);
}

TEST(FourierMotzkin, IdempotentOnAbsentVariable) {
  const auto sys = appendix_system();
  const auto once = fm_eliminate(sys, "R30");
  const auto twice = fm_eliminate(once, "R30");
  ASSERT_EQ(once.constraints.size(), twice.constraints.size());
  for (std::size_t i = 0; i < once.constraints.size(); ++i)
    EXPECT_TRUE(once.constraints[i] == twice.constraints[i]);
}

TEST(FourierMotzkin, ExactRationals) {
  const auto out = fm_eliminate(parse("a: 3*y + 1*x <= 1\nb: -7*y + 2*x <= 1/5\n"), "y");
  ASSERT_EQ(out.constraints.size(), 1u);
  EXPECT_EQ(out.constraints[0].coeff("x"), Rational(1, 3) + Rational(2, 7));
  EXPECT_EQ(out.constraints[0].constant, Rational(1, 3) + Rational(1, 35));
}

TEST(FourierMotzkin, AppendixProjectionHasNoEliminatedVariables) {
  const auto once = fm_eliminate(appendix_system(), "R30");
  const auto out = fm_eliminate(once, "R31");
  for (const auto& c : out.constraints) {
    EXPECT_EQ(c.coeff("R30"), 0);
    EXPECT_EQ(c.coeff("R31"), 0);
  }
  // FM bound: zero-coefficient constraints + |P| * |N| at each step
  EXPECT_LE(once.constraints.size(), 11u * 11u / 4u + 11u);
  EXPECT_LE(out.constraints.size(), once.constraints.size() * once.constraints.size() / 4 +
                                        once.constraints.size());
}

// A point satisfies the projection iff some y completes it (dense y grid,
// 2e-3 margin on either side).
TEST(FourierMotzkin, SoundAndCompleteOnRandomSystems) {
  Rng rng(31);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_real_distribution<double> pt(-4.0, 4.0);
  struct Row {
    double ax, ay, b;
  };
  auto rows_of = [](const InequalitySystem& s) {
    std::vector<Row> out;
    for (const auto& c : s.constraints) {
      const auto le = c.as_le();
      out.push_back({le.coeff("x").get_d(), le.coeff("y").get_d(), le.constant.get_d()});
    }
    return out;
  };
  auto holds = [](const std::vector<Row>& rows, double x, double y, double margin) {
    for (const auto& r : rows)
      if (r.ax * x + r.ay * y > r.b + margin) return false;
    return true;
  };
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::string text = "ylo: 1*y >= -5\nyhi: 1*y <= 5\n";
    for (int k = 0; k < 5; ++k)
      text += "c" + std::to_string(k) + ": " + std::to_string(coef(rng)) + "*x + " +
              std::to_string(coef(rng)) + "*y <= " + std::to_string(coef(rng) + 2) + "\n";
    const auto sys = parse(text);
    if (!sys.has_variable("x")) continue;
    const auto rows = rows_of(sys), proj = rows_of(fm_eliminate(sys, "y"));
    for (int p = 0; p < 50; ++p) {
      const double x = pt(rng);
      bool loose = false, tight = false;
      for (int i = 0; i <= 10000; ++i) {
        const double y = -5.0 + i * 1e-3;
        loose = loose || holds(rows, x, y, 2e-3);
        tight = tight || holds(rows, x, y, -2e-3);
      }
      const bool projected = holds(proj, x, 0.0, 0.0);
      if (tight) {
        EXPECT_TRUE(projected) << text << "x=" << x;
      }
      if (!loose) {
        EXPECT_FALSE(projected) << text << "x=" << x;
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(TextFormat, RoundTrip) {
  for (const auto& sys : {appendix_system(), theorem2_system(), theorem3_system(),
                          projected_appendix()}) {
    const auto back = parse_system(to_text(sys));
    ASSERT_EQ(back.constraints.size(), sys.constraints.size());
    for (std::size_t i = 0; i < sys.constraints.size(); ++i) {
      EXPECT_TRUE(back.constraints[i] == sys.constraints[i]) << to_text(sys.constraints[i]);
      EXPECT_EQ(back.constraints[i].label, sys.constraints[i].label);
    }
    EXPECT_EQ(back.atoms.size(), sys.atoms.size());
  }
}

TEST(TextFormat, Errors) {
  EXPECT_THROW(parse_system("no label here\n"), std::invalid_argument);
  EXPECT_THROW(parse_system("a: 1*R < 3\n"), std::invalid_argument);
  EXPECT_THROW(parse_system("a: x*R <= 3\n"), std::invalid_argument);
}

TEST(MaxRate, Examples) {
  const auto m = max_rate(parse("a: 1*R <= 7/10\nb: 2*R <= 1\n"), no_atoms());
  EXPECT_TRUE(m.feasible);
  EXPECT_DOUBLE_EQ(m.value, 0.5);
  EXPECT_EQ(max_rate(parse("a: 1*R <= 1\nbad: 0 <= -1\n"), no_atoms()).value, 0.0);
  const auto u = max_rate(parse("a: 1*R >= 1\n"), no_atoms());
  EXPECT_TRUE(u.unbounded);
  EXPECT_THROW(max_rate(parse("a: 1*x <= 1\n"), no_atoms()), std::invalid_argument);
}

TEST(MaxRate, MissingAtomValue) {
  EXPECT_THROW(max_rate(theorem2_system(), no_atoms()), std::out_of_range);
}

TEST(RemoveRedundant, Examples) {
  const auto dup = parse("a: 1*R <= 1\nb: 1*R <= 1\nc: 1*R + 1*x <= 3\n");
  EXPECT_EQ(remove_redundant(dup, {no_atoms()}).constraints.size(), 2u);

  const auto sys = parse("a: 1*R <= 1*I(X1;Y2)\nb: 1*R <= 1*I(X1;Y2) + 1*I(X1;Y4)\n");
  Rng rng(40);
  std::vector<AtomValuation> vals;
  const std::vector<Atom> list{parse_atom("I(X1;Y2)"), parse_atom("I(X1;Y4)")};
  for (int i = 0; i < 20; ++i) vals.push_back(atoms_from_pmf(random_thm2_joint(rng), list));
  const auto out = remove_redundant(sys, vals);
  ASSERT_EQ(out.constraints.size(), 1u);
  EXPECT_EQ(out.constraints[0].label, "a");

  EXPECT_TRUE(remove_redundant(InequalitySystem{{"R"}, {}, {}}, {no_atoms()}).constraints.empty());
  EXPECT_THROW(remove_redundant(sys, {}), std::invalid_argument);
}

TEST(AtomsFromPmf, PointMass) {
  std::vector<double> probs(256, 0.0);
  probs[0] = 1.0;
  const JointPmf j(thm2_labels(), std::vector<std::size_t>(8, 2), probs);
  const auto sys = appendix_system();
  const auto v = atoms_from_pmf(j, atom_union({&sys}));
  for (const auto& [id, x] : v.values) EXPECT_EQ(x, 0.0) << id;
}

TEST(AtomsFromPmf, CopiedBit) {
  // X1 fair bit, Y2 = X1, everything else independent constant.
  std::vector<double> probs(256, 0.0);
  probs[0] = 0.5;
  probs[(1u << 7) | (1u << 3)] = 0.5;
  const JointPmf j(thm2_labels(), std::vector<std::size_t>(8, 2), probs);
  const auto a = appendix_system();
  const auto t = theorem2_system();
  const auto v = atoms_from_pmf(j, atom_union({&a, &t}));
  for (const auto& [id, x] : v.values) {
    const Atom atom = parse_atom(id);
    auto has = [](const Group& g, const char* l) { return std::find(g.begin(), g.end(), l) != g.end(); };
    const bool pair = (has(atom.a, "X1") && has(atom.b, "Y2")) || (has(atom.a, "Y2") && has(atom.b, "X1"));
    EXPECT_NEAR(x, pair ? 1.0 : 0.0, 1e-12) << id;
  }
  EXPECT_NEAR(v.at(atoms::relay1_private().id), 1.0, 1e-12);
}

TEST(AtomsFromPmf, QuantizationIdentity) {
  Rng rng(41);
  const std::vector<Atom> list{atoms::quant_rate(), atoms::quant_useful(), atoms::quant_penalty()};
  for (int i = 0; i < 50; ++i) {
    const auto v = atoms_from_pmf(random_thm2_joint(rng), list);
    // I(Yh3;Y3|X3) = I(Yh3;Xbar Y4|X3) + I(Yh3;Y3|Xbar X3 Y4)
    EXPECT_NEAR(v.at(atoms::quant_rate().id),
                v.at(atoms::quant_useful().id) + v.at(atoms::quant_penalty().id), 1e-9);
    EXPECT_GE(v.at(atoms::quant_rate().id) + 1e-12, v.at(atoms::quant_useful().id));
  }
}

TEST(Equivalence, WitnessesMatchToo) {
  const auto rep = verify_equivalence(projected_appendix(), theorem2_system(), valuations(50, 4, 25));
  EXPECT_TRUE(rep.pass) << rep.to_json().dump();
}

TEST(Equivalence, IdenticalSystems) {
  const auto vals = valuations(20, 3);
  const auto rep = verify_equivalence(theorem2_system(), theorem2_system(), vals);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.worst_gap, 0.0);
}

TEST(Equivalence, ProjectedAppendixMatchesTheorem) {
  const auto vals = valuations(100, 1);
  const auto rep = verify_equivalence(projected_appendix(), theorem2_system(), vals, 1e-9);
  EXPECT_TRUE(rep.pass) << rep.to_json().dump();
  EXPECT_LE(rep.worst_gap, 1e-9);
}

TEST(Equivalence, MutationsAreDetected) {
  const auto vals = valuations(200, 1, 10);
  const auto proj = projected_appendix();
  for (const char* label : {"2R", "jd9", "jd3", "jd2", "jd1"}) {
    const auto rep = verify_equivalence(proj, without_constraint(theorem2_system(), label), vals);
    EXPECT_FALSE(rep.pass) << label;
  }
}

TEST(Equivalence, FallbackCoversConditionViolations) {
  const auto rep = verify_fallback(valuations(200, 2));
  EXPECT_GT(rep.violating, 0u);
  EXPECT_TRUE(rep.pass()) << rep.worst_excess;
}

TEST(RemoveRedundant, ProjectedAppendixKeepsFiveRateBounds) {
  const auto vals = valuations(200, 1, 10);
  const auto reduced = remove_redundant(projected_appendix(), vals);
  EXPECT_EQ(count_rate_upper_bounds(reduced), 5u) << to_text(reduced);
  EXPECT_TRUE(verify_equivalence(reduced, theorem2_system(), valuations(100, 7)).pass);
}

TEST(Theorem3System, MatchesDiscreteEvaluation) {
  Rng rng(42);
  const auto sys = theorem3_system();
  std::vector<Atom> list;
  for (const auto& [id, a] : sys.atoms) list.push_back(a);
  for (int i = 0; i < 30; ++i) {
    const auto j = random_thm2_joint(rng);
    const auto m = max_rate(sys, atoms_from_pmf(j, list));
    const auto t = thm3_bounds_discrete(j);
    EXPECT_EQ(m.feasible, t.feasible);
    EXPECT_NEAR(m.value, t.rate(), 1e-9);
  }
}

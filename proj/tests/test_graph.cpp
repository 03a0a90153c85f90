#include "pcorr/graph_model.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using namespace pcorr;

namespace {

// Active-path search over all simple paths of the skeleton.
bool d_separated_by_paths(const Dag& dag, const Triple& t) {
    const int p = dag.p();
    std::vector<char> inS(p + 1, 0), anc(p + 1, 0);
    for (int s : t.S) inS[s] = 1;
    for (int v = 1; v <= p; ++v) {
        // v is an ancestor of S (or in S) if some directed path reaches S.
        std::function<bool(int)> reaches = [&](int u) {
            if (inS[u]) return true;
            for (int c : dag.children(u))
                if (reaches(c)) return true;
            return false;
        };
        anc[v] = reaches(v);
    }
    std::vector<int> path{t.i};
    std::vector<char> on(p + 1, 0);
    on[t.i] = 1;
    auto adjacent = [&](int a, int b) { return dag.has_edge(std::min(a, b), std::max(a, b)); };
    auto into = [&](int from, int to) { return dag.has_edge(from, to); };
    std::function<bool()> search = [&]() -> bool {
        int last = path.back();
        if (last == t.j) {
            for (std::size_t k = 1; k + 1 < path.size(); ++k) {
                int a = path[k - 1], v = path[k], b = path[k + 1];
                bool collider = into(a, v) && into(b, v);
                if (collider && !anc[v]) return false;
                if (!collider && inS[v]) return false;
            }
            return true;
        }
        for (int w = 1; w <= p; ++w) {
            if (on[w] || !adjacent(last, w)) continue;
            on[w] = 1;
            path.push_back(w);
            bool found = search();
            path.pop_back();
            on[w] = 0;
            if (found) return true;
        }
        return false;
    };
    return !search();
}

std::vector<Triple> all_triples(int p) {
    std::vector<Triple> out;
    for (int i = 1; i <= p; ++i)
        for (int j = i + 1; j <= p; ++j)
            for (std::uint32_t m = 0; m < (1u << p); ++m) {
                if (m & ((1u << (i - 1)) | (1u << (j - 1)))) continue;
                std::vector<int> S;
                for (int v = 1; v <= p; ++v)
                    if (m & (1u << (v - 1))) S.push_back(v);
                out.emplace_back(i, j, S);
            }
    return out;
}

std::vector<Dag> all_families(int max_p) {
    std::vector<Dag> out;
    for (int p = 2; p <= max_p; ++p) {
        out.push_back(Dag::make_family(Family::Complete, p));
        out.push_back(Dag::make_family(Family::Chain, p));
        out.push_back(Dag::make_family(Family::Star, p));
        for (int q = 1; q <= p - 3; ++q) out.push_back(Dag::make_family(Family::Tripart, p, q));
        if (p >= 5) out.push_back(Dag::make_family(Family::Bow, p));
    }
    return out;
}

std::vector<double> random_point(std::size_t d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> x(d);
    for (auto& v : x) v = u(rng);
    return x;
}

const char* kEq5 =
    "(1+a46^2)*a13*a23*a35^2 + (1+a45^2)*a13*a23*a36^2 + (1+a35^2)*a14*a24*a46^2"
    " + (1+a36^2)*a14*a24*a45^2 + a13*a24*a35*a45 + a13*a24*a36*a46 + a14*a23*a35*a45"
    " + a14*a23*a36*a46 - 2*a13*a23*a35*a36*a45*a46 - 2*a14*a24*a35*a36*a45*a46";

} // namespace

TEST(Dag, FamilyEdgeSets) {
    Dag t = Dag::make_family(Family::Tripart, 6, 2);
    EXPECT_EQ(t.edges(), (std::vector<Edge>{{1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 5}, {3, 6}, {4, 5}, {4, 6}}));
    EXPECT_EQ(Dag::make_family(Family::Chain, 2).edges(), (std::vector<Edge>{{1, 2}}));
    Dag b = Dag::make_family(Family::Bow, 5);
    EXPECT_EQ(b.edges(), (std::vector<Edge>{{1, 3}, {1, 4}, {2, 3}, {2, 5}, {3, 4}, {3, 5}}));
    EXPECT_EQ(Dag::make_family(Family::Star, 4).edges(), (std::vector<Edge>{{1, 2}, {1, 3}, {1, 4}}));
    EXPECT_EQ(Dag::make_family(Family::Complete, 4).edges().size(), 6u);
    EXPECT_EQ(t.name(), "tripart6_2");
}

TEST(Dag, ParameterRangeErrors) {
    EXPECT_THROW(Dag::make_family(Family::Tripart, 5, 3), InputError);
    EXPECT_THROW(Dag::make_family(Family::Tripart, 5, 0), InputError);
    EXPECT_THROW(Dag::make_family(Family::Bow, 4), InputError);
    EXPECT_THROW(Dag::make_family(Family::Chain, 1), InputError);
    EXPECT_THROW(Dag(3, {{2, 1}}), InputError);
    EXPECT_THROW(Dag(3, {{1, 2}, {1, 2}}), InputError);
    EXPECT_THROW(Triple(1, 1, {}), InputError);
    EXPECT_THROW(Triple(1, 2, {2}), InputError);
}

TEST(Dag, EdgeNamesForLargeGraphs) {
    EXPECT_EQ(Dag::edge_name(3, 4), "a34");
    EXPECT_EQ(Dag::edge_name(9, 10), "a9_10");
}

TEST(Dag, TreeDetection) {
    EXPECT_TRUE(Dag::make_family(Family::Chain, 5).is_tree());
    EXPECT_TRUE(Dag::make_family(Family::Star, 5).is_tree());
    EXPECT_FALSE(Dag::make_family(Family::Complete, 3).is_tree());
    EXPECT_FALSE(Dag(3, {{1, 3}, {2, 3}}).is_tree());
    EXPECT_FALSE(Dag(4, {{1, 2}}).is_tree());
}

TEST(Dag, UnlabeledEnumerationCounts) {
    EXPECT_EQ(enumerate_ordered_dags(3).size(), 8u);
    EXPECT_EQ(enumerate_unlabeled_dags(3).size(), 6u);
    EXPECT_EQ(enumerate_unlabeled_dags(4).size(), 31u);
}

TEST(Concentration, TripartiteEntries) {
    Dag d = Dag::make_family(Family::Tripart, 6, 2);
    PolyMatrix K = concentration(d);
    auto r = d.ring();
    EXPECT_EQ(K(0, 0), parse_poly("a13^2+a14^2+1", r));
    EXPECT_EQ(K(0, 2), parse_poly("-a13", r));
    EXPECT_EQ(K(2, 2), parse_poly("a35^2+a36^2+1", r));
    EXPECT_EQ(K(2, 3), parse_poly("a35*a45+a36*a46", r));
    EXPECT_EQ(K(4, 4), Poly::constant(r, 1));
    EXPECT_TRUE(K(4, 5).is_zero());
}

TEST(Concentration, EdgelessIsIdentity) {
    Dag d(4, {});
    EXPECT_EQ(concentration(d), PolyMatrix::identity(d.ring(), 4));
}

TEST(Concentration, UnitDeterminantAndSymmetry) {
    for (const Dag& d : all_families(6)) {
        PolyMatrix K = concentration(d);
        EXPECT_EQ(K, K.transpose()) << d.name();
        EXPECT_EQ(det(K), Poly::constant(d.ring(), 1)) << d.name();
        for (std::size_t k = 0; k < K.rows(); ++k) EXPECT_EQ(K(k, k).constant_term(), 1);
    }
}

TEST(Minor, WeightedPathSumOfTripartite) {
    Dag d = Dag::make_family(Family::Tripart, 6, 2);
    Poly f = almost_principal_minor(d, Triple(1, 2, {5, 6}));
    Poly expected = parse_poly(kEq5, d.ring());
    EXPECT_TRUE(f == expected || f == -expected) << to_string(f);
    std::vector<double> ones(d.edges().size(), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(eval(f, ones)), 8.0);
}

TEST(Minor, BinomialFactorization) {
    Dag d(4, {{1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    Poly f = almost_principal_minor(d, Triple(1, 2, {4}));
    auto r = d.ring();
    Poly expected = parse_poly("a13*a34+a14", r) * parse_poly("a23*a34+a24", r);
    EXPECT_TRUE(f == expected || f == -expected) << to_string(f);
}

TEST(Minor, MonomialExamples) {
    Dag t41 = Dag::make_family(Family::Tripart, 4, 1);
    Poly f = almost_principal_minor(t41, Triple(1, 2, {4}));
    Poly m = parse_poly("a13*a23*a34^2", t41.ring());
    EXPECT_TRUE(f == m || f == -m) << to_string(f);

    Dag bow = Dag::make_family(Family::Bow, 5);
    Poly g = almost_principal_minor(bow, Triple(4, 5, {3}));
    Poly mb = parse_poly("a13*a14*a23*a25", bow.ring());
    EXPECT_TRUE(g == mb || g == -mb) << to_string(g);
}

TEST(Minor, BowEmptyConditioningSet) {
    Dag bow = Dag::make_family(Family::Bow, 5);
    Poly g = almost_principal_minor(bow, Triple(4, 5, {}));
    Poly e = parse_poly("a34*a35*(1+a13^2+a23^2)+a23*a25*a34+a13*a14*a35", bow.ring());
    EXPECT_TRUE(g == e || g == -e) << to_string(g);
}

TEST(Minor, DSeparatedMeansZero) {
    Dag c = Dag::make_family(Family::Chain, 4);
    EXPECT_TRUE(almost_principal_minor(c, Triple(1, 3, {2})).is_zero());
}

TEST(PartialCorrelation, ClosedFormExamples) {
    Dag star = Dag::make_family(Family::Star, 4);
    std::vector<double> pt{1.0, 1.0, 0.3};
    EXPECT_NEAR(std::abs(partial_correlation(star, Triple(2, 3, {}), pt)), 0.5, 1e-12);

    Dag chain = Dag::make_family(Family::Chain, 4);
    std::vector<double> ones(3, 1.0);
    EXPECT_NEAR(std::abs(partial_correlation(chain, Triple(1, 4, {}), ones)), 0.5, 1e-12);

    Dag c2 = Dag::make_family(Family::Chain, 2);
    std::vector<double> zero{0.0};
    EXPECT_EQ(partial_correlation(c2, Triple(1, 2, {}), zero), 0.0);
}

TEST(PartialCorrelation, EvaluatorsAgreeAndAreBounded) {
    std::mt19937_64 rng(99);
    for (const Dag& d : {Dag::make_family(Family::Complete, 5), Dag::make_family(Family::Bow, 5),
                         Dag::make_family(Family::Tripart, 6, 2)}) {
        AllPartialCorrelations all(d);
        auto triples = d_connected_triples(d);
        std::vector<CompiledCorrelation> compiled;
        for (std::size_t k = 0; k < triples.size(); k += 7) compiled.emplace_back(d, triples[k]);
        for (int s = 0; s < 200; ++s) {
            auto x = random_point(d.edges().size(), rng);
            all.compute(x);
            for (std::size_t k = 0, c = 0; k < triples.size(); k += 7, ++c) {
                double a = partial_correlation(d, triples[k], x);
                EXPECT_NEAR(all.corr(triples[k]), a, 1e-9) << triples[k].to_string();
                EXPECT_NEAR(compiled[c](x), a, 1e-9) << triples[k].to_string();
            }
        }
    }
}

TEST(PartialCorrelation, MagnitudeAtMostOne) {
    std::mt19937_64 rng(5);
    for (const Dag& d : {Dag::make_family(Family::Complete, 4), Dag::make_family(Family::Chain, 5),
                         Dag::make_family(Family::Bow, 5)}) {
        AllPartialCorrelations all(d);
        auto triples = d_connected_triples(d);
        for (int s = 0; s < 10000; ++s) {
            all.compute(random_point(d.edges().size(), rng));
            for (const auto& t : triples) ASSERT_LE(std::abs(all.corr(t)), 1.0 + 1e-12);
        }
    }
}

TEST(PartialCorrelation, PrincipalMinorsAtLeastOne) {
    std::mt19937_64 rng(8);
    Dag d = Dag::make_family(Family::Complete, 5);
    PolyMatrix K = concentration(d);
    std::vector<CompiledPoly> minors;
    for (std::uint32_t m = 1; m < 32; ++m) {
        std::vector<int> R;
        for (int v = 1; v <= 5; ++v)
            if (m & (1u << (v - 1))) R.push_back(v);
        minors.emplace_back(principal_minor(d, K, R));
    }
    for (int s = 0; s < 2000; ++s) {
        auto x = random_point(d.edges().size(), rng);
        for (const auto& c : minors) ASSERT_GE(c(x), 1.0 - 1e-12);
    }
}

TEST(DSeparation, NamedExamples) {
    Dag t41 = Dag::make_family(Family::Tripart, 4, 1);
    EXPECT_TRUE(d_separated(t41, Triple(1, 2, {})));
    EXPECT_FALSE(d_separated(t41, Triple(1, 2, {3})));
    EXPECT_FALSE(almost_principal_minor(t41, Triple(1, 2, {3})).is_zero());
    for (int p = 2; p <= 7; ++p) EXPECT_FALSE(d_separated(Dag::make_family(Family::Chain, p), Triple(1, p, {})));
    EXPECT_TRUE(d_separated(Dag::make_family(Family::Bow, 5), Triple(4, 5, {1, 2, 3})));
    EXPECT_FALSE(d_separated(Dag::make_family(Family::Bow, 5), Triple(4, 5, {3})));
    EXPECT_TRUE(d_separated(Dag(3, {{1, 3}, {2, 3}}), Triple(1, 2, {})));
    EXPECT_FALSE(d_separated(Dag(3, {{1, 3}, {2, 3}}), Triple(1, 2, {3})));
}

TEST(DSeparation, MatchesPathEnumerationOnAllOrderedDagsUpToFive) {
    for (int p = 2; p <= 5; ++p) {
        auto triples = all_triples(p);
        for (const Dag& d : enumerate_ordered_dags(p))
            for (const auto& t : triples)
                ASSERT_EQ(d_separated(d, t), d_separated_by_paths(d, t)) << p << " " << t.to_string();
    }
}

TEST(DSeparation, MatchesPathEnumerationOnRandomSixNodeDags) {
    std::mt19937_64 rng(1);
    std::bernoulli_distribution coin(0.4);
    auto triples = all_triples(6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Edge> e;
        for (int i = 1; i <= 6; ++i)
            for (int j = i + 1; j <= 6; ++j)
                if (coin(rng)) e.emplace_back(i, j);
        Dag d(6, e);
        for (const auto& t : triples) ASSERT_EQ(d_separated(d, t), d_separated_by_paths(d, t));
    }
}

TEST(DSeparation, EquivalentToVanishingMinorUpToFourNodes) {
    for (int p = 2; p <= 4; ++p) {
        auto triples = all_triples(p);
        for (const Dag& d : enumerate_ordered_dags(p)) {
            PolyMatrix K = concentration(d);
            for (const auto& t : triples)
                ASSERT_EQ(d_separated(d, t), almost_principal_minor(d, K, t).is_zero()) << t.to_string();
        }
    }
}

TEST(Triples, ChainAndCompleteTenCounts) {
    EXPECT_EQ(d_connected_triples(Dag::make_family(Family::Chain, 10)).size(), 4097u);
    EXPECT_EQ(d_connected_triples(Dag::make_family(Family::Complete, 10)).size(), 11520u);
    auto single = d_connected_triples(Dag::make_family(Family::Chain, 2));
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0], Triple(1, 2, {}));
    EXPECT_EQ(d_connected_triples(Dag::make_family(Family::Chain, 4), true).size(),
              2 * d_connected_triples(Dag::make_family(Family::Chain, 4)).size());
    EXPECT_THROW(d_connected_triples(Dag::make_family(Family::Chain, 13)), InputError);
}

TEST(Triples, ChainCountClosedForm) {
    for (int p = 2; p <= 10; ++p) {
        std::size_t expected = 0;
        for (int k = 1; k < p; ++k) expected += static_cast<std::size_t>(k) << (k - 1);
        EXPECT_EQ(d_connected_triples(Dag::make_family(Family::Chain, p)).size(), expected);
    }
}

TEST(Triples, OrderedThreeNodeDagsGiveTwentySeven) {
    std::size_t total = 0;
    for (const Dag& d : enumerate_ordered_dags(3)) total += d_connected_triples(d).size();
    EXPECT_EQ(total, 27u);
    std::size_t total4 = 0;
    for (const Dag& d : enumerate_ordered_dags(4)) total4 += d_connected_triples(d).size();
    EXPECT_EQ(total4, 965u);
}

#include "pcorr/pipeline.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pcorr;

namespace {

RlctOptions quick() {
    RlctOptions o;
    o.classify.positivity_samples = 4096;
    return o;
}

ParamSpace cube_for(const Dag& g) { return ParamSpace::cube(g.ring()->arity()); }

// Every collider-free rooted tree on p nodes with edges i<j: each node k>1
// picks one parent among 1..k-1.
std::vector<Dag> all_trees(int p) {
    std::vector<Dag> out;
    std::vector<int> parent(p + 1, 1);
    while (true) {
        std::vector<Edge> e;
        for (int k = 2; k <= p; ++k) e.emplace_back(parent[k], k);
        out.emplace_back(p, e);
        int k = p;
        while (k >= 2 && parent[k] == k - 1) parent[k--] = 1;
        if (k < 2) break;
        ++parent[k];
    }
    return out;
}

} // namespace

TEST(RlctPair, OrderAndRendering) {
    RlctPair half(1, 2, 1), one1(1, 1, 1), one2(1, 1, 2), inf;
    EXPECT_LT(half, one2);
    EXPECT_LT(one2, one1);
    EXPECT_LT(one1, inf);
    EXPECT_FALSE(inf < inf);
    EXPECT_EQ(half.to_string(), "(1/2,1)");
    EXPECT_EQ(one2.to_string(), "(1,2)");
    EXPECT_EQ(inf.to_string(), "(inf)");
    EXPECT_EQ(RlctPair::parse("(1/2, 1)"), half);
    EXPECT_EQ(RlctPair::parse("(1/1,2)"), one2);
    EXPECT_EQ(RlctPair::parse("(inf)"), inf);
    EXPECT_THROW(RlctPair::parse("(1,0)"), InputError);
    EXPECT_THROW(RlctPair::parse("1,2"), InputError);
    EXPECT_THROW(RlctPair(0, 1, 1), InputError);
    EXPECT_THROW(inf.m(), InputError);
}

TEST(RlctPair, TotalOrderOnRandomPairs) {
    std::mt19937 rng(5);
    std::vector<RlctPair> v;
    for (int k = 0; k < 60; ++k) {
        int num = 1 + static_cast<int>(rng() % 4), den = 1 + static_cast<int>(rng() % 3);
        v.push_back(rng() % 10 == 0 ? RlctPair::infinity() : RlctPair(num, den, 1 + rng() % 3));
    }
    for (const auto& a : v)
        for (const auto& b : v) {
            EXPECT_EQ((a < b) + (b < a) + (a == b), 1);
            for (const auto& c : v) {
                if (a < b && b < c) {
                    EXPECT_LT(a, c);
                }
            }
        }
}

TEST(Rlct, MonomialRule) {
    EXPECT_EQ(rlct_monomial({1, 1}), RlctPair(1, 1, 2));
    EXPECT_EQ(rlct_monomial({3}), RlctPair(1, 3, 1));
    EXPECT_EQ(rlct_monomial({1, 1, 2}), RlctPair(1, 2, 1));
    EXPECT_EQ(rlct_monomial({0, 0}), RlctPair::infinity());
    // xi^4 y with Jacobian xi
    EXPECT_EQ(rlct_monomial({4, 1}, {1, 0}, {true, true}), RlctPair(1, 2, 1));
    // Inactive coordinates are ignored.
    EXPECT_EQ(rlct_monomial({4, 1}, {1, 0}, {false, true}), RlctPair(1, 1, 1));
    EXPECT_THROW(rlct_monomial({1}, {0, 0}, {true}), InputError);
}

TEST(Rlct, SosAndProducts) {
    EXPECT_EQ(rlct_sos(1), RlctPair(1, 2, 1));
    EXPECT_EQ(rlct_sos(2), RlctPair(1, 1, 1));
    EXPECT_EQ(rlct_sos(3), RlctPair(3, 2, 1));
    EXPECT_EQ(rlct_product_disjoint({RlctPair(1, 1, 2), RlctPair(1, 1, 1)}), RlctPair(1, 1, 3));
    EXPECT_EQ(rlct_product_disjoint({RlctPair(1, 2, 1), RlctPair(1, 1, 2)}), RlctPair(1, 2, 1));
    EXPECT_EQ(rlct_product_disjoint({RlctPair(3, 2, 1)}), RlctPair(3, 2, 1));
    EXPECT_THROW(rlct_product_disjoint({}), InputError);
    EXPECT_THROW(rlct_graph({}), InputError);
}

TEST(Rlct, TreeRule) {
    auto chain = Dag::make_family(Family::Chain, 6);
    EXPECT_EQ(rlct_tree(chain, Triple(1, 6, {})), RlctPair(1, 1, 5));
    auto star = Dag::make_family(Family::Star, 6);
    EXPECT_EQ(rlct_tree(star, Triple(2, 3, {})), RlctPair(1, 1, 2));
    EXPECT_EQ(rlct_tree(Dag::make_family(Family::Chain, 3), Triple(1, 2, {})), RlctPair(1, 1, 1));
    EXPECT_THROW(rlct_tree(Dag::make_family(Family::Complete, 3), Triple(1, 2, {})), InputError);
    EXPECT_THROW(rlct_tree(chain, Triple(1, 3, {2})), InputError);
}

TEST(Rlct, TreeRuleMatchesMonomialContentUpToSevenNodes) {
    std::size_t checked = 0;
    for (int p = 2; p <= 7; ++p) {
        for (const auto& tree : all_trees(p)) {
            for (const auto& t : d_connected_triples(tree)) {
                auto shape = monomial_content(almost_principal_minor(tree, t));
                std::vector<unsigned> kappa(shape.kappa.begin(), shape.kappa.end());
                ASSERT_EQ(rlct_tree(tree, t), rlct_monomial(kappa)) << t.to_string();
                // kappa is the indicator of the path edges
                unsigned ones = 0;
                for (auto k : kappa) {
                    ASSERT_LE(k, 1u);
                    ones += k;
                }
                ASSERT_EQ(ones, tree_path_length(tree, t.i, t.j));
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 10000u);
}

TEST(Pipeline, TripartiteFourOne) {
    auto g = Dag::make_family(Family::Tripart, 4, 1);
    auto rep = rlct_of_triple(g, Triple(1, 2, {4}), cube_for(g), quick());
    EXPECT_EQ(rep.pair, RlctPair(1, 2, 1));
    EXPECT_EQ(rep.method, "monomial");
    EXPECT_EQ(rlct_of_dag(g, cube_for(g), quick()).pair, RlctPair(1, 2, 1));
}

TEST(Pipeline, TripartiteSumOfSquaresCases) {
    const RlctPair expect[] = {RlctPair(1, 2, 1), RlctPair(1, 1, 3), RlctPair(1, 1, 2), RlctPair(1, 1, 2)};
    for (int p = 4; p <= 7; ++p) {
        auto g = Dag::make_family(Family::Tripart, p, p - 3);
        std::vector<int> S;
        for (int k = 4; k <= p; ++k) S.push_back(k);
        auto rep = rlct_of_triple(g, Triple(1, 2, S), cube_for(g), quick());
        EXPECT_EQ(rep.pair, expect[p - 4]) << "p=" << p << " method " << rep.method;
    }
}

TEST(Pipeline, TreeGraphs) {
    for (int p = 3; p <= 6; ++p) {
        auto c = Dag::make_family(Family::Chain, p);
        EXPECT_EQ(rlct_of_dag(c, cube_for(c), quick()).pair, RlctPair(1, 1, p - 1));
        auto s = Dag::make_family(Family::Star, p);
        EXPECT_EQ(rlct_of_dag(s, cube_for(s), quick()).pair, RlctPair(1, 1, 2));
    }
}

TEST(Pipeline, BowTie) {
    auto g = Dag::make_family(Family::Bow, 5);
    auto rep = rlct_of_triple(g, Triple(4, 5, {3}), cube_for(g), quick());
    EXPECT_EQ(rep.pair, RlctPair(1, 1, 4));
}

TEST(Pipeline, SeparatedTripleIsInfinite) {
    auto g = Dag::make_family(Family::Chain, 4);
    auto rep = rlct_of_triple(g, Triple(1, 3, {2}), cube_for(g), quick());
    EXPECT_TRUE(rep.pair.is_infinite());
    EXPECT_EQ(rep.method, "zero");
}

TEST(Pipeline, SmoothMinorOfTriangle) {
    auto g = Dag::make_family(Family::Complete, 3);
    auto rep = rlct_of_triple(g, Triple(1, 2, {3}), cube_for(g), quick());
    EXPECT_EQ(rep.pair, RlctPair(1, 1, 1));
    EXPECT_EQ(rep.method, "smooth");
}

TEST(Pipeline, SingularWithoutPlanNeedsBlowup) {
    auto f = parse_poly("x^2 - y^2");
    EXPECT_THROW(rlct_of_poly(f, ParamSpace::cube(2), quick()), NeedsBlowupError);
}

TEST(Pipeline, CertificateReplacesSearch) {
    std::istringstream in("K3 2 1 3 smooth\nfoo 1 2 - singular-locus a12; a13\n");
    auto store = CertificateStore::parse(in);
    ASSERT_EQ(store.size(), 2u);
    ASSERT_NE(store.find("K3", "1,2|3"), nullptr);
    auto g = Dag::make_family(Family::Complete, 3);
    auto opt = quick();
    opt.certificates = &store;
    opt.classify.budget = 10;  // too small to certify by search
    auto rep = rlct_of_triple(g, Triple(1, 2, {3}), cube_for(g), opt);
    EXPECT_EQ(rep.method, "smooth_certificate");
    EXPECT_EQ(rep.pair, RlctPair(1, 1, 1));
    opt.certificates = nullptr;
    EXPECT_THROW(rlct_of_triple(g, Triple(1, 2, {3}), cube_for(g), opt), InconclusiveError);
}

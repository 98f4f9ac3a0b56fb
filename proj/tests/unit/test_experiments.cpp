#include <gtest/gtest.h>

#include "mtlnet/error.hpp"
#include "mtlnet/experiments.hpp"

using namespace mtlnet;

namespace {

EnsembleConfig small_config() {
  EnsembleConfig cfg;
  cfg.n_networks = 6;
  cfg.grid = FrequencyGrid(1e5, 1e6, 80);
  cfg.n_bins = 3;
  return cfg;
}

bool same_topology(const NetworkTopology& a, const NetworkTopology& b) {
  if (a.nodes != b.nodes || a.branches.size() != b.branches.size()) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    const Branch &x = a.branches[i], &y = b.branches[i];
    if (x.id != y.id || x.node_a != y.node_a || x.node_b != y.node_b || x.cable != y.cable || x.length != y.length) {
      return false;
    }
  }
  for (const auto& [node, load] : a.loads) {
    if (!b.loads.count(node) || load.evaluate(1e6, 2) != b.loads.at(node).evaluate(1e6, 2)) return false;
  }
  return a.loads.size() == b.loads.size();
}

TimeTrace spikes(std::size_t n, const std::vector<std::pair<std::size_t, double>>& s) {
  TimeTrace t;
  t.t_step = 1e-9;
  t.samples.assign(n, RMatrix::Zero(1, 1));
  for (const auto& [i, a] : s) t.samples[i](0, 0) = a;
  return t;
}

}  // namespace

TEST(Generator, DeterministicInSeedAndIndex) {
  const EnsembleConfig cfg = small_config();
  EXPECT_TRUE(same_topology(generate_random_network(cfg, 4), generate_random_network(cfg, 4)));
  EXPECT_FALSE(same_topology(generate_random_network(cfg, 4), generate_random_network(cfg, 5)));
  EnsembleConfig other = cfg;
  other.seed = 99;
  EXPECT_FALSE(same_topology(generate_random_network(cfg, 4), generate_random_network(other, 4)));
}

TEST(Generator, AllDrawsAreValidTrees) {
  const EnsembleConfig cfg = small_config();
  for (std::size_t i = 0; i < 500; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    ASSERT_TRUE(validate_topology(net).valid()) << i;
    ASSERT_GE(net.nodes.size(), cfg.min_nodes);
    ASSERT_LE(net.nodes.size(), cfg.max_nodes);
    for (const auto& b : net.branches) {
      ASSERT_GE(b.length, cfg.min_length);
      ASSERT_LE(b.length, cfg.max_length);
    }
  }
}

TEST(Generator, TwoNodesGiveSingleBranch) {
  EnsembleConfig cfg = small_config();
  cfg.min_nodes = cfg.max_nodes = 2;
  const NetworkTopology net = generate_random_network(cfg, 0);
  EXPECT_EQ(net.branches.size(), 1u);
  EXPECT_EQ(net.port(kTransmitterPort).node, "n1");
  EXPECT_EQ(net.port(kReceiverPort).node, "n0");
}

TEST(Generator, TransmitterOnFarthestLeaf) {
  const EnsembleConfig cfg = small_config();
  for (std::size_t i = 0; i < 20; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const double d_tx = path_length(net, "n0", net.port(kTransmitterPort).node);
    for (const auto& n : net.nodes) EXPECT_LE(path_length(net, "n0", n), d_tx + 1e-9);
  }
}

TEST(Generator, RejectsInvalidConfig) {
  EnsembleConfig cfg = small_config();
  cfg.min_nodes = 10;
  cfg.max_nodes = 5;
  EXPECT_THROW(generate_random_network(cfg, 0), ValidationError);
  cfg = small_config();
  cfg.cable_library.clear();
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Fault, InsideTheNetwork) {
  const EnsembleConfig cfg = small_config();
  for (std::size_t i = 0; i < 50; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const LumpedFault f = random_lumped_fault(cfg, net, i);
    const Branch* b = net.find_branch(f.branch);
    ASSERT_NE(b, nullptr);
    EXPECT_GT(f.offset, 0.0);
    EXPECT_LT(f.offset, b->length);
    const double g = f.admittance.evaluate(1e6, 2)(0, 0).real();
    EXPECT_GE(g, cfg.fault_min_conductance);
    EXPECT_LE(g, cfg.fault_max_conductance);
  }
}

TEST(Sweep, ZeroSeverityGivesZeroDeltas) {
  EnsembleConfig cfg = small_config();
  cfg.fault_min_conductance = cfg.fault_max_conductance = 1e-300;
  const SweepResult r = run_distance_sweep(cfg);
  ASSERT_EQ(r.records.size(), cfg.n_networks);
  for (const auto& rec : r.records) {
    EXPECT_LE(rec.delta_admittance, 1e-9);
    EXPECT_LE(rec.delta_reflection, 1e-9);
    EXPECT_LE(rec.delta_ctf, 1e-9);
  }
}

TEST(Sweep, DeterministicRecords) {
  const EnsembleConfig cfg = small_config();
  const SweepResult a = run_distance_sweep(cfg);
  const SweepResult b = run_distance_sweep(cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].anomaly, b.records[i].anomaly);
    EXPECT_EQ(a.records[i].distance, b.records[i].distance);
    EXPECT_EQ(a.records[i].delta_admittance, b.records[i].delta_admittance);
    EXPECT_EQ(a.records[i].delta_reflection, b.records[i].delta_reflection);
    EXPECT_EQ(a.records[i].delta_ctf, b.records[i].delta_ctf);
  }
}

TEST(Sweep, RecordsAreWithinTheNetwork) {
  const SweepResult r = run_distance_sweep(small_config());
  EXPECT_EQ(r.skipped, 0u);
  std::size_t binned = 0;
  for (const auto& b : r.bins) binned += b.count;
  EXPECT_EQ(binned, r.records.size());
  for (const auto& rec : r.records) {
    EXPECT_GE(rec.distance, 0.0);
    EXPECT_GE(rec.path_fraction, 0.0);
    EXPECT_LE(rec.path_fraction, 1.0);
  }
}

TEST(Statistics, SpearmanCorrelation) {
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4}, {9, 4, 1, 0}), -1.0, 1e-15);
  // Monotone but non-linear: rank correlation stays 1.
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4, 5}, {1, 8, 27, 64, 125}), 1.0, 1e-15);
  EXPECT_NEAR(spearman_correlation({1, 2, 3}, {1, 1, 1}), 0.0, 1e-15);
  EXPECT_THROW(spearman_correlation({1}, {1}), ValidationError);
}

TEST(Statistics, BinSummary) {
  SweepResult r;
  for (int i = 0; i < 8; ++i) {
    SweepRecord rec;
    rec.distance = i < 4 ? 10.0 : 90.0;
    rec.path_fraction = i < 4 ? 0.1 : 0.9;
    rec.delta_admittance = i < 4 ? 1.0 + i : 0.5;
    rec.delta_reflection = 1.0;
    rec.delta_ctf = 2.0;
    r.records.push_back(rec);
  }
  summarize_sweep(r, 3);
  ASSERT_EQ(r.bins.size(), 3u);
  EXPECT_EQ(r.bins[0].count, 4u);
  EXPECT_EQ(r.bins[2].count, 4u);
  EXPECT_DOUBLE_EQ(r.bins[0].admittance.median, 2.5);
  EXPECT_DOUBLE_EQ(r.bins[0].admittance.q1, 1.75);
  EXPECT_DOUBLE_EQ(r.bins[0].admittance.q3, 3.25);
  EXPECT_DOUBLE_EQ(r.spearman_admittance, -1.0);
  EXPECT_DOUBLE_EQ(r.spread_reflection, 0.0);
}

TEST(PeakClassification, NewShiftedAmplitude) {
  const TimeTrace base = spikes(400, {{100, 1.0}, {200, 0.5}});
  EXPECT_EQ(classify_peak_changes(base, base).classes, std::set<PeakChange>{PeakChange::unchanged});
  EXPECT_EQ(classify_peak_changes(base, spikes(400, {{100, 0.7}, {200, 0.5}})).classes,
            std::set<PeakChange>{PeakChange::amplitude_only});
  const PeakDiff added = classify_peak_changes(base, spikes(400, {{60, 0.3}, {100, 1.0}, {200, 0.5}}));
  EXPECT_EQ(added.classes, std::set<PeakChange>{PeakChange::new_peak});
  ASSERT_EQ(added.new_peaks.size(), 1u);
  EXPECT_EQ(added.new_peaks[0].sample, 60u);
  const PeakDiff moved = classify_peak_changes(base, spikes(400, {{100, 1.0}, {210, 0.5}}));
  EXPECT_EQ(moved.classes, std::set<PeakChange>{PeakChange::shifted_peak});
  ASSERT_EQ(moved.shifted.size(), 1u);
  EXPECT_EQ(moved.shifted[0].second.sample, 210u);
}

TEST(PeakClassification, OneSampleJitterIsNotAShift) {
  const TimeTrace base = spikes(400, {{100, 1.0}, {200, 0.5}});
  EXPECT_EQ(classify_peak_changes(base, spikes(400, {{101, 1.0}, {200, 0.5}})).classes,
            std::set<PeakChange>{PeakChange::unchanged});
}

TEST(Scenarios, SingleLineSignatures) {
  const NetworkTopology net = single_line_network(2, 150.0);
  const auto outcomes = run_scenario_suite(net, "in", single_line_scenarios(2, 150.0), FrequencyGrid::plc_default());
  ASSERT_EQ(outcomes.size(), 3u);
  for (const auto& o : outcomes) {
    EXPECT_TRUE(o.rule_satisfied) << o.name << ": " << o.note;
    EXPECT_EQ(o.diff.classes, o.expected) << o.name;
  }
}

TEST(Scenarios, ExpectedSignatures) {
  EXPECT_EQ(expected_signature(LoadChange{}), std::set<PeakChange>{PeakChange::amplitude_only});
  EXPECT_EQ(expected_signature(LumpedFault{}), std::set<PeakChange>{PeakChange::new_peak});
  EXPECT_EQ(expected_signature(DistributedFault{"b", 0, 1, CableSpec::default_cable(2)}),
            (std::set<PeakChange>{PeakChange::new_peak, PeakChange::shifted_peak}));
}

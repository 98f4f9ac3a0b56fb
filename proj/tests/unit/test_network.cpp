#include <gtest/gtest.h>

#include <random>

#include "mtlnet/error.hpp"
#include "mtlnet/experiments.hpp"
#include "mtlnet/network.hpp"
#include "oracles.hpp"

using namespace mtlnet;

namespace {

NetworkTopology tee(int conductors = 2) {
  NetworkTopology net;
  const CableSpec cable = CableSpec::default_cable(conductors);
  net.cables.emplace(cable.label(), cable);
  net.nodes = {"a", "j", "b", "c"};
  net.branches = {{"aj", "a", "j", cable.label(), 40.0},
                  {"jb", "j", "b", cable.label(), 25.0},
                  {"jc", "j", "c", cable.label(), 60.0}};
  net.loads.emplace("a", AdmittanceModel({ParallelRC{std::vector<double>(conductors, 150.0),
                                                     std::vector<double>(conductors, 1e-9)}}));
  net.loads.emplace("b", AdmittanceModel::conductance(0.004, conductors));
  net.loads.emplace("c", AdmittanceModel({ParallelRC{std::vector<double>(conductors, 47.0),
                                                     std::vector<double>(conductors, 0.0)}}));
  net.ports.emplace("pa", Port{"a", AdmittanceModel::conductance(0.0125, conductors)});
  net.ports.emplace("pb", Port{"b", AdmittanceModel::conductance(0.0125, conductors)});
  return net;
}

bool mentions(const ValidationReport& r, const std::string& text) {
  for (const auto& v : r.violations) {
    if (v.find(text) != std::string::npos) return true;
  }
  return false;
}

const FrequencyGrid kGrid(1e5, 2e6, 40);

}  // namespace

TEST(Topology, ValidTee) {
  EXPECT_TRUE(validate_topology(tee()).valid());
}

TEST(Topology, DetectsCycle) {
  NetworkTopology net = tee();
  net.branches.push_back({"bc", "b", "c", "default2", 10.0});
  EXPECT_TRUE(mentions(validate_topology(net), "not a tree"));
}

TEST(Topology, DetectsDisconnectedForest) {
  NetworkTopology net = tee();
  net.nodes.push_back("island");
  net.nodes.push_back("island2");
  net.branches.push_back({"ii", "island", "island2", "default2", 5.0});
  net.branches.erase(net.branches.begin());
  net.loads.emplace("island", AdmittanceModel::conductance(0.01, 2));
  net.loads.emplace("island2", AdmittanceModel::conductance(0.01, 2));
  EXPECT_TRUE(mentions(validate_topology(net), "not connected"));
}

TEST(Topology, DetectsDanglingLeafAndBadReferences) {
  NetworkTopology net = tee();
  net.loads.erase("c");
  net.branches[0].length = 0.0;
  net.branches[1].cable = "missing";
  net.ports.emplace("px", Port{"nowhere", {}});
  const ValidationReport r = validate_topology(net);
  EXPECT_TRUE(mentions(r, "dangling leaf 'c'"));
  EXPECT_TRUE(mentions(r, "positive length"));
  EXPECT_TRUE(mentions(r, "unknown cable"));
  EXPECT_TRUE(mentions(r, "unknown node 'nowhere'"));
}

TEST(Topology, DetectsMixedConductorCounts) {
  NetworkTopology net = tee();
  const CableSpec three = CableSpec::default_cable(3);
  net.cables.emplace(three.label(), three);
  net.branches[2].cable = three.label();
  EXPECT_FALSE(validate_topology(net).valid());
  EXPECT_THROW(NetworkSolver(net, kGrid), ValidationError);
}

TEST(Topology, TreePath) {
  const NetworkTopology net = tee();
  const TreePath p = tree_path(net, "b", "c");
  EXPECT_EQ(p.nodes, (std::vector<std::string>{"b", "j", "c"}));
  EXPECT_EQ(p.branches, (std::vector<std::string>{"jb", "jc"}));
  EXPECT_DOUBLE_EQ(path_length(net, "a", "c"), 100.0);
  EXPECT_DOUBLE_EQ(path_length(net, "a", "a"), 0.0);
}

TEST(Reduction, MatchesNodalAnalysisOnTee) {
  const NetworkTopology net = tee();
  const NetworkSolver solver(net, kGrid);
  const PortReduction red = solver.reduce_to_port("pa");
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    const oracle::NodalNetwork nodal(net, kGrid.frequency(k));
    EXPECT_LT(relative_difference(red.y_in[k], nodal.input_admittance("pa")), 1e-9) << k;
  }
}

TEST(Reduction, MatchesNodalAnalysisOnRandomTrees) {
  EnsembleConfig cfg;
  cfg.grid = kGrid;
  cfg.cable_library = {CableSpec::default_cable(2), CableSpec("stiff", CoupledCableModel{2, 0.2, 1e6, 0.7e-6, 70e-12,
                                                                                         1e-3, 0.4, -0.2})};
  for (std::size_t i = 0; i < 6; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const NetworkSolver solver(net, kGrid);
    const PortReduction red = solver.reduce_to_port(kReceiverPort);
    for (std::size_t k = 0; k < kGrid.size(); k += 7) {
      const oracle::NodalNetwork nodal(net, kGrid.frequency(k));
      ASSERT_LT(relative_difference(red.y_in[k], nodal.input_admittance(kReceiverPort)), 1e-9) << i << " " << k;
    }
  }
}

TEST(Reduction, PortNodeLoadIsDisconnected) {
  NetworkTopology net = tee();
  const MatrixSpectrum before = NetworkSolver(net, kGrid).reduce_to_port("pa").y_in;
  net.loads.at("a") = AdmittanceModel::conductance(5.0, 2);
  const MatrixSpectrum after = NetworkSolver(net, kGrid).reduce_to_port("pa").y_in;
  EXPECT_EQ(max_relative_difference(before, after), 0.0);
}

TEST(Reduction, NodeEquivalentsIncludeSubtrees) {
  const NetworkTopology net = tee();
  const NetworkSolver solver(net, kGrid);
  const PortReduction red = solver.reduce_to_port("pa");
  const auto& leaf = red.node_equivalents.at("b");
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    EXPECT_LT(relative_difference(leaf[k], net.loads.at("b").evaluate(kGrid.frequency(k), 2)), 1e-15);
  }
}

TEST(Reduction, UnknownPortThrows) {
  EXPECT_THROW(NetworkSolver(tee(), kGrid).reduce_to_port("nope"), ValidationError);
}

TEST(Reduction, ResonanceReportsBranchAndFrequency) {
  NetworkTopology net;
  const CableSpec ideal("ideal", ConstantCableModel{RMatrix::Zero(1, 1), RMatrix::Constant(1, 1, 250e-9),
                                                    RMatrix::Zero(1, 1), RMatrix::Constant(1, 1, 100e-12)});
  net.cables.emplace("ideal", ideal);
  net.nodes = {"s", "e"};
  net.branches = {{"quarter", "s", "e", "ideal", 50.0}};
  net.loads.emplace("e", AdmittanceModel{});
  net.ports.emplace("p", Port{"s", AdmittanceModel::conductance(0.02, 1)});
  try {
    NetworkSolver(net, FrequencyGrid(0.5e6, 0.5e6, 4)).reduce_to_port("p");
    FAIL() << "expected a singularity";
  } catch (const SingularityError& e) {
    EXPECT_NE(std::string(e.what()).find("branch 'quarter'"), std::string::npos);
    EXPECT_DOUBLE_EQ(e.frequency(), 1e6);
  }
}

TEST(Reflection, MatchesDefinitionFromNodalAdmittance) {
  const NetworkTopology net = tee();
  const MatrixSpectrum rho = NetworkSolver(net, kGrid).input_reflection("pa");
  for (std::size_t k = 0; k < kGrid.size(); k += 5) {
    const CMatrix y_in = oracle::NodalNetwork(net, kGrid.frequency(k)).input_admittance("pa");
    const CMatrix y_r = CMatrix::Identity(2, 2) * 0.0125;
    const CMatrix expected = y_r * (y_in + y_r).inverse() * (y_in - y_r) * y_r.inverse();
    EXPECT_LT(relative_difference(rho[k], expected), 1e-9);
  }
}

TEST(TwoSection, ClosedFormAgreesWithRecursiveReduction) {
  const CableSpec c1 = CableSpec::default_cable(2);
  const CableSpec c2("thin", CoupledCableModel{2, 0.3, 1e6, 0.8e-6, 60e-12, 2e-3, 0.25, -0.2});
  const AdmittanceModel y_load({ParallelRC{{80.0, 120.0}, {2e-9, 0.5e-9}}});
  const AdmittanceModel y_source = AdmittanceModel::conductance(0.011, 2);
  const TwoSectionResult closed = two_section_oracle(c1, 35.0, c2, 52.0, y_load, y_source, kGrid);

  NetworkTopology net;
  net.cables.emplace("c1", CableSpec("c1", c1.model()));
  net.cables.emplace("c2", CableSpec("c2", c2.model()));
  net.nodes = {"s", "m", "e"};
  net.branches = {{"first", "s", "m", "c1", 35.0}, {"second", "m", "e", "c2", 52.0}};
  net.loads.emplace("e", y_load);
  net.ports.emplace("p", Port{"s", y_source});
  const NetworkSolver solver(net, kGrid);
  EXPECT_LT(max_relative_difference(closed.y_in, solver.reduce_to_port("p").y_in), 1e-9);
  EXPECT_LT(max_relative_difference(closed.rho_in, solver.input_reflection("p")), 1e-9);
}

TEST(EndToEnd, MatchesNodalAnalysisForBothReferences) {
  const NetworkTopology net = tee();
  const NetworkSolver solver(net, kGrid);
  const EndToEndResult src = solver.end_to_end_ctf("pa", "b", CtfReference::source_emf);
  const EndToEndResult node = solver.end_to_end_ctf("pa", "b", CtfReference::node_voltage);
  EXPECT_EQ(src.backbone.branches, (std::vector<std::string>{"aj", "jb"}));
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    const oracle::NodalNetwork nodal(net, kGrid.frequency(k));
    EXPECT_LT(relative_difference(src.h_total[k], nodal.ctf_source("pa", "b")), 1e-9) << k;
    EXPECT_LT(relative_difference(node.h_total[k], nodal.ctf_node("pa", "b")), 1e-9) << k;
  }
}

TEST(EndToEnd, MatchesNodalAnalysisOnRandomTrees) {
  EnsembleConfig cfg;
  cfg.grid = kGrid;
  cfg.cable_library = {CableSpec::default_cable(3)};
  for (std::size_t i = 0; i < 4; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const NetworkSolver solver(net, kGrid);
    const MatrixSpectrum h = solver.end_to_end_ctf(kTransmitterPort, "n0", CtfReference::source_emf).h_total;
    for (std::size_t k = 0; k < kGrid.size(); k += 9) {
      const oracle::NodalNetwork nodal(net, kGrid.frequency(k));
      ASSERT_LT(relative_difference(h[k], nodal.ctf_source(kTransmitterPort, "n0")), 1e-9) << i << " " << k;
    }
  }
}

TEST(EndToEnd, ReceiverWithoutLoadIsRejected) {
  NetworkTopology net = tee();
  EXPECT_THROW(NetworkSolver(net, kGrid).end_to_end_ctf("pa", "j"), ValidationError);
  EXPECT_THROW(NetworkSolver(net, kGrid).end_to_end_ctf("pa", "a"), ValidationError);
}

TEST(EndToEnd, ReciprocityWithEqualTerminations) {
  for (int n : {1, 2}) {
    NetworkTopology net = tee(n);
    const AdmittanceModel y = AdmittanceModel::conductance(0.0125, n);
    net.loads.at("a") = y;
    net.loads.at("b") = y;
    const NetworkSolver solver(net, kGrid);
    const MatrixSpectrum ab = solver.end_to_end_ctf("pa", "b", CtfReference::source_emf).h_total;
    const MatrixSpectrum ba = solver.end_to_end_ctf("pb", "a", CtfReference::source_emf).h_total;
    for (std::size_t k = 0; k < kGrid.size(); ++k) {
      EXPECT_LT(relative_difference(ab[k], ba[k].transpose()), 1e-9);
    }
  }
}

TEST(PortSignalTest, EchoAndLoadVoltages) {
  const NetworkTopology net = tee();
  const NetworkSolver solver(net, kGrid);
  const std::vector<CVector> v(kGrid.size(), CVector::Ones(2));
  const PortSignal s = port_signal(solver, "pa", "b", v);
  const MatrixSpectrum h = solver.end_to_end_ctf("pa", "b").h_total;
  const MatrixSpectrum rho = solver.input_reflection("pa");
  for (std::size_t k = 0; k < kGrid.size(); k += 10) {
    EXPECT_LT((s.v_load[k] - h[k] * v[k]).norm(), 1e-12);
    EXPECT_LT((s.v_echo[k] + rho[k] * v[k]).norm(), 1e-12);  // Y_R is a multiple of I
  }
}

#include "flowopt/dataset.hpp"

#include "flowopt/errors.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

using namespace flowopt;
using namespace flowopt::testing;

TEST_SUITE_BEGIN("dataset");

TEST_CASE("the stock sweep reproduces the reference load ladders") {
    const NetworkTopology topo = paper_topology();
    const std::vector<double> training = load_schedule(topo, 0.30, 0.89, 10);
    REQUIRE(training.size() == 10);
    for (int k = 0; k < 10; ++k)
        CHECK(training[static_cast<std::size_t>(k)] == doctest::Approx(275.0 + 60.0 * k));

    const std::vector<double> test = load_schedule(topo, 0.30, 0.89, 10, 30.0);
    for (int k = 0; k < 10; ++k)
        CHECK(test[static_cast<std::size_t>(k)] == doctest::Approx(305.0 + 60.0 * k));
}

TEST_CASE("degenerate schedules") {
    const NetworkTopology topo = paper_topology();
    const auto single = load_schedule(topo, 0.5, 0.500001, 1);
    CHECK(single.size() == 1);
    CHECK(single[0] == doctest::Approx(458.0));
    CHECK_THROWS_AS(load_schedule(topo, 0.3, 0.9, 0), std::invalid_argument);
    CHECK_THROWS_AS(load_schedule(topo, 0.9, 0.3, 10), std::invalid_argument);
    CHECK_THROWS_AS(load_schedule(topo, 0.0, 0.9, 10), std::invalid_argument);
    CHECK_THROWS_AS(load_schedule(topo, 0.3, 1.0, 10), std::invalid_argument);
}

TEST_CASE("a built row carries self-consistent recomputable columns") {
    const NetworkTopology topo = paper_topology();
    const Dataset dataset =
        build_dataset(topo, {275.0}, make_optimizer(Method::PsoChi), 1);
    REQUIRE(dataset.rows.size() == 1);
    const DatasetRow& row = dataset.rows[0];

    CHECK(row.delay_msec == doctest::Approx(17.0).epsilon(0.012));
    CHECK(row.mlu == doctest::Approx(0.2408).epsilon(0.0085));
    CHECK(std::abs(delay_msec(topo, row.flows_kbps) - row.delay_msec) <= 1e-6);
    CHECK(std::abs(mean_link_utilization(topo, row.flows_kbps) - row.mlu) <= 1e-9);

    const double sum = std::accumulate(row.flows_kbps.begin(), row.flows_kbps.end(), 0.0);
    CHECK(std::abs(sum - 275.0) <= 0.001 * 275.0);

    const double oracle = delay_msec(topo, kkt_optimal_flow(topo, 275.0));
    CHECK(row.delay_msec <= oracle * 1.02);
    CHECK(row.generations > 0);
}

TEST_CASE("the near-capacity row stays on the reference delay") {
    const NetworkTopology topo = paper_topology();
    const Dataset dataset = build_dataset(topo, {845.0}, make_optimizer(Method::PsoChi), 3,
                                          DatasetRole::Test);
    REQUIRE(dataset.rows.size() == 1);
    const DatasetRow& row = dataset.rows[0];
    CHECK(std::abs(row.delay_msec - 173.6) <= 2.0);
    CHECK(row.mlu == doctest::Approx(0.9156).epsilon(0.003));
    const double oracle = delay_msec(topo, kkt_optimal_flow(topo, 845.0));
    CHECK(row.delay_msec <= oracle * 1.02);
    const double sum = std::accumulate(row.flows_kbps.begin(), row.flows_kbps.end(), 0.0);
    CHECK(std::abs(sum - 845.0) <= 0.001 * 845.0);
}

TEST_CASE("generation is reproducible byte for byte") {
    const NetworkTopology topo = paper_topology();
    const std::vector<double> loads = {305.0, 425.0};
    const Dataset a = build_dataset(topo, loads, make_optimizer(Method::PsoChi), 9);
    const Dataset b = build_dataset(topo, loads, make_optimizer(Method::PsoChi), 9);
    CHECK(dataset_to_csv(a) == dataset_to_csv(b));
}

TEST_CASE("rows use per-row derived seeds") {
    const NetworkTopology topo = paper_topology();
    const OptimizerFn chi = make_optimizer(Method::PsoChi);
    const Dataset both = build_dataset(topo, {305.0, 425.0}, chi, 9);
    const Dataset second_only = build_dataset(topo, {425.0}, chi, 10);
    CHECK(both.rows[1].flows_kbps == second_only.rows[0].flows_kbps);
}

TEST_CASE("csv round-trip preserves every value") {
    const NetworkTopology topo = paper_topology();
    const Dataset dataset =
        build_dataset(topo, {275.0, 335.0}, make_optimizer(Method::Oracle), 1);
    const std::string csv = dataset_to_csv(dataset);
    const Dataset reread = dataset_from_csv(csv);
    REQUIRE(reread.rows.size() == dataset.rows.size());
    for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
        CHECK(reread.rows[i].load_kbps == dataset.rows[i].load_kbps);
        CHECK(reread.rows[i].delay_msec == dataset.rows[i].delay_msec);
        CHECK(reread.rows[i].mlu == dataset.rows[i].mlu);
        CHECK(reread.rows[i].generations == dataset.rows[i].generations);
        CHECK(reread.rows[i].flows_kbps == dataset.rows[i].flows_kbps);
    }
    CHECK(dataset_to_csv(reread) == csv);
}

TEST_CASE("csv schema errors") {
    CHECK_THROWS_WITH_AS(dataset_from_csv("delay,load\n"), doctest::Contains("header"),
                         ParseError);
    CHECK_THROWS_WITH_AS(dataset_from_csv("load,delay_msec,mlu,generations,f1,fX\n"),
                         doctest::Contains("header"), ParseError);
    CHECK_THROWS_WITH_AS(
        dataset_from_csv("load,delay_msec,mlu,generations,f1\n100,1.5,0.1\n"),
        doctest::Contains("columns"), ParseError);
    CHECK_THROWS_WITH_AS(
        dataset_from_csv("load,delay_msec,mlu,generations,f1\n100,abc,0.1,5,20\n"),
        doctest::Contains("non-numeric"), ParseError);
    CHECK_THROWS_AS(dataset_from_csv(""), ParseError);
}

TEST_CASE("a header-only file is a valid empty dataset") {
    const Dataset dataset = dataset_from_csv("load,delay_msec,mlu,generations,f1,f2\n");
    CHECK(dataset.rows.empty());
}

TEST_CASE("file round-trip") {
    const NetworkTopology topo = paper_topology();
    const Dataset dataset = build_dataset(topo, {400.0}, make_optimizer(Method::Oracle), 1);
    const auto path = std::filesystem::temp_directory_path() / "flowopt_dataset_test.csv";
    write_dataset(dataset, path);
    const Dataset reread = read_dataset(path);
    CHECK(dataset_to_csv(reread) == dataset_to_csv(dataset));
    std::filesystem::remove(path);
}

TEST_CASE("rounded table formatting") {
    Dataset dataset;
    dataset.rows.push_back({275.0, 17.0213, 0.24082, 67, {10.94, 39.79}});
    CHECK(dataset_to_rounded_csv(dataset) ==
          "load,delay_msec,mlu,generations,f1,f2\n"
          "275,17.0,0.2408,67,11,40\n");
}

TEST_CASE("out-of-range loads are rejected") {
    const NetworkTopology topo = paper_topology();
    CHECK_THROWS_AS(build_dataset(topo, {1000.0}, make_optimizer(Method::Oracle), 1),
                    std::domain_error);
}

TEST_SUITE_END();

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "facmon/panel.hpp"

using namespace facmon;
namespace fs = std::filesystem;

namespace {

fs::path write_tmp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST(LoadCsv, RowsAreTimeTransposesToSeriesByTime) {
    const auto p = write_tmp("facmon_t1.csv", "1,2,3,4,5\n6,7,8,9,10\n11,12,13,14,15\n");
    const Panel panel = load_csv(p.string(), Orientation::rows_are_time);
    EXPECT_EQ(panel.n_series(), 5);
    EXPECT_EQ(panel.n_periods(), 3);
    EXPECT_DOUBLE_EQ(panel.values(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(panel.values(4, 2), 15.0);
}

TEST(LoadCsv, HeaderRowGoesToLabels) {
    const auto p = write_tmp("facmon_t2.csv", "a,b,c\n1,2,3\n4,5,6\n");
    const Panel panel = load_csv(p.string(), Orientation::rows_are_time);
    EXPECT_EQ(panel.n_series(), 3);
    EXPECT_EQ(panel.n_periods(), 2);
    ASSERT_EQ(panel.meta.series_labels.size(), 3u);
    EXPECT_EQ(panel.meta.series_labels[1], "b");
}

TEST(LoadCsv, RaggedRowsNameTheRow) {
    const auto p = write_tmp("facmon_t3.csv", "1,2,3,4\n5,6,7,8\n9,10,11\n");
    try {
        load_csv(p.string(), Orientation::rows_are_time);
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
}

TEST(LoadCsv, NonNumericCellNamesCoordinates) {
    const auto p = write_tmp("facmon_t4.csv", "1,2\n3,oops\n");
    try {
        load_csv(p.string(), Orientation::rows_are_time);
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
    }
}

TEST(LoadCsv, EmptyFileFails) {
    const auto p = write_tmp("facmon_t5.csv", "");
    EXPECT_THROW(load_csv(p.string(), Orientation::rows_are_time), InvalidInput);
}

TEST(LoadCsv, ScientificNotationAndLabelColumn) {
    const auto p = write_tmp("facmon_t6.csv", "s1,1e-3,2.5E2\ns2,-4e0,0.125\n");
    const Panel panel = load_csv(p.string(), Orientation::rows_are_series);
    EXPECT_EQ(panel.n_series(), 2);
    EXPECT_DOUBLE_EQ(panel.values(0, 0), 1e-3);
    EXPECT_DOUBLE_EQ(panel.values(0, 1), 250.0);
    EXPECT_EQ(panel.meta.series_labels[0], "s1");
}

TEST(SaveCsv, RoundTripsBitExactly) {
    Eigen::MatrixXd m(3, 4);
    m << 0.1, -2.5e-17, 3.0, M_PI,
         1.0 / 3.0, 6e22, -7.125, 1e-300,
         9.0, 10.0, 11.0, 0.123456789012345678;
    const Panel panel = Panel::from_matrix(m);
    const auto p = fs::temp_directory_path() / "facmon_rt.csv";
    save_csv(panel, p.string(), Orientation::rows_are_time);
    const Panel back = load_csv(p.string(), Orientation::rows_are_time);
    ASSERT_EQ(back.values.rows(), m.rows());
    ASSERT_EQ(back.values.cols(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            EXPECT_EQ(back.values(i, j), m(i, j)) << i << "," << j;
}

TEST(Center, ConstantSeriesBecomesZero) {
    Eigen::MatrixXd m(2, 5);
    m.row(0).setConstant(3.25);
    m.row(1) << 1, 2, 3, 4, 5;
    const Panel centered = center(Panel::from_matrix(m), 3);
    EXPECT_TRUE((centered.values.row(0).array() == 0.0).all());
    EXPECT_TRUE(centered.meta.centered);
}

TEST(Center, HandExampleWindowTwo) {
    Eigen::MatrixXd m(2, 4);
    m.row(0) << 1, 2, 3, 4;
    m.row(1) << 0, 0, 0, 0;
    const Panel centered = center(Panel::from_matrix(m), 2);
    EXPECT_DOUBLE_EQ(centered.values(0, 0), -0.5);
    EXPECT_DOUBLE_EQ(centered.values(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(centered.values(0, 2), 1.5);
    EXPECT_DOUBLE_EQ(centered.values(0, 3), 2.5);
}

TEST(Center, Idempotent) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Random(6, 40) * 13.0;
    const Panel once = center(Panel::from_matrix(m), 10);
    const Panel twice = center(once, 10);
    const double scale = m.cwiseAbs().maxCoeff();
    EXPECT_LT((twice.values - once.values).cwiseAbs().maxCoeff(), 1e-12 * scale);
}

TEST(Center, WindowOutOfRangeFails) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 5);
    const Panel panel = Panel::from_matrix(m);
    EXPECT_THROW(center(panel, 0), InvalidInput);
    EXPECT_THROW(center(panel, 6), InvalidInput);
}

TEST(Panel, RejectsNonFiniteAndTiny) {
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 3, std::nan("");
    EXPECT_THROW(Panel::from_matrix(bad), InvalidInput);
    EXPECT_THROW(Panel::from_matrix(Eigen::MatrixXd::Zero(1, 5)), InvalidInput);
}

TEST(Standardize, UnitTrainingVarianceAndZeroVarianceError) {
    Eigen::MatrixXd m(2, 6);
    m.row(0) << 2, 4, 6, 8, 1, 3;   // training var over first 4 = 20/3
    m.row(1) << -1, 1, -1, 1, 5, 5;
    const Panel out = standardize(Panel::from_matrix(m), 4);
    for (int i = 0; i < 2; ++i) {
        const auto training = out.values.row(i).head(4);
        const double var = (training.array() - training.mean()).square().sum() / 3.0;
        EXPECT_NEAR(var, 1.0, 1e-12) << "series " << i;
    }
    Eigen::MatrixXd flat(2, 5);
    flat.row(0).setConstant(7.0);
    flat.row(1) << 1, 2, 3, 4, 5;
    try {
        standardize(Panel::from_matrix(flat), 3);
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("series 1"), std::string::npos) << e.what();
    }
}

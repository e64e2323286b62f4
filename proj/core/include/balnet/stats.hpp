#pragma once

#include <span>
#include <vector>

namespace balnet::stats {

// Sample median; even counts average the two central order statistics.
// Throws DomainError on empty input.
double median(std::vector<double> values);

// 1-based ranks with ties sharing their mean rank.
std::vector<double> midranks(std::span<const double> values);

// Throws DomainError on length mismatch, fewer than two points, or a
// constant series.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace balnet::stats

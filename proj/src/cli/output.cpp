#include "synthcoupling/cli/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace synthcoupling::cli {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string format_list(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out)
            throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed for " + path.string());
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i)
            text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

void CsvTable::add_row(const std::vector<double>& values)
{
    if (values.size() != columns_)
        throw std::logic_error("CsvTable: row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            text_ += ',';
        text_ += format_double(values[i]);
    }
    text_ += '\n';
    ++rows_;
}

Manifest::Section& Manifest::section(const std::string& name)
{
    for (auto& [n, s] : sections_)
        if (n == name)
            return s;
    return sections_.emplace_back(name, Section{}).second;
}

void Manifest::set(const std::string& name, const std::string& key, const std::string& value)
{
    auto& s = section(name);
    for (auto& [k, v] : s) {
        if (k == key) {
            v = value;
            return;
        }
    }
    s.emplace_back(key, value);
}

void Manifest::set(const std::string& name, const std::string& key, double value)
{
    set(name, key, format_double(value));
}

std::string Manifest::str() const
{
    std::string out;
    for (const auto& [name, entries] : sections_) {
        if (!out.empty())
            out += '\n';
        out += "[" + name + "]\n";
        for (const auto& [k, v] : entries)
            out += k + " = " + v + "\n";
    }
    return out;
}

} // namespace synthcoupling::cli

// SPDX-License-Identifier: Apache-2.0
//
// stfchan - space-time-frequency non-stationary THz channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "cir.hpp"
#include "common.hpp"
#include "largescale.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace stfchan
{
    // ---- CIR tensor ---------------------------------------------------------------------------

    // Cells are stored in (q, p, i, t) row-major order.
    struct CirTensor
    {
        std::uint32_t m_r = 0, m_t = 0, n_f = 0, n_t = 0;
        std::vector<std::vector<Tap>> cells; // empty: no data

        std::size_t cell_count() const
        {
            return static_cast<std::size_t>(m_r) * m_t * n_f * n_t;
        }
        std::size_t index(std::size_t q, std::size_t p, std::size_t i, std::size_t t) const
        {
            return ((q * m_t + p) * n_f + i) * n_t + t;
        }
    };

    inline constexpr std::uint32_t kCirFormatVersion = 1;
    inline constexpr std::uint32_t kCirRecordSize = 88;
    inline constexpr std::uint32_t kCirLayoutId = 1; // u32 cluster, u32 ray, f64 delay, f64 doppler, 4 x (f64 re, f64 im)

    // Small-scale CIRs of every element pair, sub-band and snapshot of a realization.
    inline CirTensor build_cir_tensor(const Realization &real)
    {
        const ModelParams &mp = *real.params;
        CirTensor t;
        t.m_r = static_cast<std::uint32_t>(mp.rx_array.size());
        t.m_t = static_cast<std::uint32_t>(mp.tx_array.size());
        t.n_f = static_cast<std::uint32_t>(mp.band.n_sub);
        t.n_t = static_cast<std::uint32_t>(mp.time.n_snapshots);
        t.cells.resize(t.cell_count());
        for (std::size_t q = 0; q < t.m_r; ++q)
            for (std::size_t p = 0; p < t.m_t; ++p)
                for (std::size_t i = 0; i < t.n_f; ++i)
                    for (std::size_t s = 0; s < t.n_t; ++s)
                        t.cells[t.index(q, p, i, s)] = assemble_cir(real, p, q, i, s);
        return t;
    }

    namespace detail
    {
        inline void put_u32(std::string &buf, std::uint32_t v)
        {
            for (int k = 0; k < 4; ++k)
                buf.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
        }

        inline void put_f64(std::string &buf, double d)
        {
            const auto v = std::bit_cast<std::uint64_t>(d);
            for (int k = 0; k < 8; ++k)
                buf.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
        }

        class ByteReader
        {
        public:
            explicit ByteReader(std::string data) : d_(std::move(data)) {}
            bool at_end() const { return pos_ == d_.size(); }
            std::uint32_t u32()
            {
                need(4);
                std::uint32_t v = 0;
                for (int k = 0; k < 4; ++k)
                    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(d_[pos_ + k])) << (8 * k);
                pos_ += 4;
                return v;
            }
            double f64()
            {
                need(8);
                std::uint64_t v = 0;
                for (int k = 0; k < 8; ++k)
                    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(d_[pos_ + k])) << (8 * k);
                pos_ += 8;
                return std::bit_cast<double>(v);
            }
            std::string bytes(std::size_t n)
            {
                need(n);
                auto s = d_.substr(pos_, n);
                pos_ += n;
                return s;
            }

        private:
            void need(std::size_t n) const
            {
                if (pos_ + n > d_.size())
                    throw IoError("CIR reader: truncated file");
            }
            std::string d_;
            std::size_t pos_ = 0;
        };

        inline void write_file(const std::filesystem::path &path, const std::string &data, std::ios::openmode mode)
        {
            std::ofstream out(path, mode | std::ios::trunc);
            if (!out)
                throw IoError("cannot open '" + path.string() + "' for writing");
            out.write(data.data(), static_cast<std::streamsize>(data.size()));
            if (!out)
                throw IoError("write failed for '" + path.string() + "'");
        }

        inline std::string read_file(const std::filesystem::path &path, std::ios::openmode mode)
        {
            std::ifstream in(path, mode);
            if (!in)
                throw IoError("cannot open '" + path.string() + "' for reading");
            std::stringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
    } // namespace detail

    inline std::string encode_cir(const CirTensor &t)
    {
        std::string buf = "STFG";
        detail::put_u32(buf, kCirFormatVersion);
        detail::put_u32(buf, t.m_r);
        detail::put_u32(buf, t.m_t);
        detail::put_u32(buf, t.n_f);
        detail::put_u32(buf, t.n_t);
        detail::put_u32(buf, kCirRecordSize);
        detail::put_u32(buf, kCirLayoutId);
        if (t.cells.empty())
            return buf;
        if (t.cells.size() != t.cell_count())
            throw IoError("CIR writer: cell count does not match the dimensions");
        for (const auto &cell : t.cells)
        {
            detail::put_u32(buf, static_cast<std::uint32_t>(cell.size()));
            for (const auto &tap : cell)
            {
                detail::put_u32(buf, tap.cluster);
                detail::put_u32(buf, tap.ray);
                detail::put_f64(buf, tap.delay);
                detail::put_f64(buf, tap.doppler);
                for (const auto &e : tap.pol)
                {
                    detail::put_f64(buf, e.real());
                    detail::put_f64(buf, e.imag());
                }
            }
        }
        return buf;
    }

    inline CirTensor decode_cir(std::string data)
    {
        detail::ByteReader r(std::move(data));
        if (r.bytes(4) != "STFG")
            throw IoError("CIR reader: bad magic");
        if (r.u32() != kCirFormatVersion)
            throw IoError("CIR reader: unsupported version");
        CirTensor t;
        t.m_r = r.u32();
        t.m_t = r.u32();
        t.n_f = r.u32();
        t.n_t = r.u32();
        if (r.u32() != kCirRecordSize || r.u32() != kCirLayoutId)
            throw IoError("CIR reader: unsupported record layout");
        if (r.at_end())
            return t;
        t.cells.resize(t.cell_count());
        for (auto &cell : t.cells)
        {
            const std::uint32_t n = r.u32();
            cell.resize(n);
            for (auto &tap : cell)
            {
                tap.cluster = r.u32();
                tap.ray = r.u32();
                tap.delay = r.f64();
                tap.doppler = r.f64();
                for (auto &e : tap.pol)
                {
                    const double re = r.f64();
                    e = {re, r.f64()};
                }
            }
        }
        if (!r.at_end())
            throw IoError("CIR reader: trailing bytes after the last cell");
        return t;
    }

    inline void write_cir(const std::filesystem::path &path, const CirTensor &t)
    {
        detail::write_file(path, encode_cir(t), std::ios::binary);
    }

    inline CirTensor read_cir(const std::filesystem::path &path)
    {
        return decode_cir(detail::read_file(path, std::ios::binary));
    }

    // ---- CSV ----------------------------------------------------------------------------------

    // Shortest round-trip representation of a double.
    inline std::string fmt(double v)
    {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    }

    struct CsvTable
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        void add(std::vector<double> values)
        {
            std::vector<std::string> r;
            for (double v : values)
                r.push_back(fmt(v));
            rows.push_back(std::move(r));
        }

        std::string str() const
        {
            std::string s;
            for (std::size_t k = 0; k < header.size(); ++k)
                s += (k ? "," : "") + header[k];
            s += "\n";
            for (const auto &r : rows)
            {
                for (std::size_t k = 0; k < r.size(); ++k)
                    s += (k ? "," : "") + r[k];
                s += "\n";
            }
            return s;
        }
    };

    inline void write_csv(const std::filesystem::path &path, const CsvTable &t)
    {
        detail::write_file(path, t.str(), std::ios::out);
    }

    // Rows of numbers after a mandatory header line.
    inline std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path &path, std::size_t columns)
    {
        std::istringstream in(detail::read_file(path, std::ios::in));
        std::string line;
        if (!std::getline(in, line))
            throw IoError("'" + path.string() + "': missing header");
        std::vector<std::vector<double>> rows;
        std::size_t lineno = 1;
        while (std::getline(in, line))
        {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            std::vector<double> row;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
            {
                try
                {
                    std::size_t used = 0;
                    row.push_back(std::stod(cell, &used));
                }
                catch (const std::exception &)
                {
                    throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": not a number");
                }
            }
            if (row.size() != columns)
                throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": expected " +
                              std::to_string(columns) + " columns");
            rows.push_back(std::move(row));
        }
        return rows;
    }

    // Two columns: frequency_hz, attenuation_db_per_m.
    inline AbsorptionTable read_absorption_csv(const std::filesystem::path &path)
    {
        AbsorptionTable t;
        for (const auto &r : read_numeric_csv(path, 2))
            t.nodes.emplace_back(r[0], r[1]);
        try
        {
            t.validate();
        }
        catch (const ConfigError &e)
        {
            throw ConfigError("'" + path.string() + "': " + e.what());
        }
        return t;
    }

    // One row per tap of a single CIR cell list.
    inline CsvTable cir_csv(const CirTensor &t)
    {
        CsvTable csv;
        csv.header = {"q", "p", "subband", "snapshot", "cluster", "ray", "delay_s", "doppler_hz", "gain_re", "gain_im"};
        if (t.cells.empty())
            return csv;
        for (std::size_t q = 0; q < t.m_r; ++q)
            for (std::size_t p = 0; p < t.m_t; ++p)
                for (std::size_t i = 0; i < t.n_f; ++i)
                    for (std::size_t s = 0; s < t.n_t; ++s)
                        for (const auto &tap : t.cells[t.index(q, p, i, s)])
                        {
                            const Complex g = tap.gain();
                            csv.rows.push_back({std::to_string(q), std::to_string(p), std::to_string(i),
                                                std::to_string(s), tap.is_los() ? "los" : std::to_string(tap.cluster),
                                                tap.is_los() ? "los" : std::to_string(tap.ray), fmt(tap.delay),
                                                fmt(tap.doppler), fmt(g.real()), fmt(g.imag())});
                        }
        return csv;
    }

    // Two columns: value, cumulative probability.
    inline std::vector<std::pair<double, double>> read_cdf_csv(const std::filesystem::path &path)
    {
        std::vector<std::pair<double, double>> pts;
        for (const auto &r : read_numeric_csv(path, 2))
            pts.emplace_back(r[0], r[1]);
        return pts;
    }

    inline CsvTable cdf_csv(const std::vector<std::pair<double, double>> &pts, const std::string &value_name)
    {
        CsvTable csv;
        csv.header = {value_name, "cdf"};
        for (const auto &[x, p] : pts)
            csv.add({x, p});
        return csv;
    }
} // namespace stfchan

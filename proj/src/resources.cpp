#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dub/errors.hpp"
#include "dub/genkb.hpp"
#include "dub/rules.hpp"

namespace dub {

namespace {

// Family deduction rules. Remember the reading direction: (s, r, o) says
// "o is the r of s". The kin of a person are closed over sibling and spouse
// links, which is why e.g. a child's wife is again a child.
constexpr const char* kRuleText = R"(# child
(B, mother, A) -> (A, child, B)
(B, father, A) -> (A, child, B)
(C, mother, A) & (B, brother, C) -> (A, child, B)
(C, mother, A) & (B, sister, C) -> (A, child, B)
(C, father, A) & (B, sister, C) -> (A, child, B)
(C, father, A) & (B, brother, C) -> (A, child, B)
(A, child, C) & (B, sister, C) -> (A, child, B)
(A, child, C) & (B, brother, C) -> (A, child, B)
(A, child, C) & (B, wife, C) -> (A, child, B)
(A, child, C) & (B, husband, C) -> (A, child, B)

# father
(A, mother, M) & (M, husband, B) -> (A, father, B)
(A, mother, M) & (B, wife, M) -> (A, father, B)

# mother
(A, father, F) & (F, wife, B) -> (A, mother, B)
(A, father, F) & (B, husband, F) -> (A, mother, B)

# husband
(B, wife, A) -> (A, husband, B)
(C, mother, A) & (C, father, B) -> (A, husband, B)

# wife
(B, husband, A) -> (A, wife, B)
(C, father, A) & (C, mother, B) -> (A, wife, B)

# brother
(A, husband, H) & (H, brother, B) -> (A, brother, B)
(A, wife, W) & (W, brother, B) -> (A, brother, B)
(A, sister, S) & (S, husband, B) -> (A, brother, B)
(H, wife, A) & (H, brother, B) -> (A, brother, B)
(W, husband, A) & (W, brother, B) -> (A, brother, B)

# sister
(A, husband, H) & (H, sister, B) -> (A, sister, B)
(A, wife, W) & (W, sister, B) -> (A, sister, B)
(A, brother, C) & (C, wife, B) -> (A, sister, B)
(H, wife, A) & (H, sister, B) -> (A, sister, B)
(W, husband, A) & (W, sister, B) -> (A, sister, B)

# uncle
(A, father, F) & (F, brother, B) -> (A, uncle, B)
(A, mother, M) & (M, brother, B) -> (A, uncle, B)
(A, aunt, T) & (T, husband, B) -> (A, uncle, B)
(A, aunt, T) & (B, wife, T) -> (A, uncle, B)

# aunt
(A, father, F) & (F, sister, B) -> (A, aunt, B)
(A, mother, M) & (M, sister, B) -> (A, aunt, B)
(A, uncle, U) & (U, wife, B) -> (A, aunt, B)
(A, uncle, U) & (B, husband, U) -> (A, aunt, B)

# nephew
(B, uncle, A) & (B, wife, C) -> (A, nephew, B)
(B, uncle, A) & (C, husband, B) -> (A, nephew, B)
(B, uncle, A) & (C, father, B) -> (A, nephew, B)
(B, aunt, A) & (B, wife, C) -> (A, nephew, B)
(B, aunt, A) & (C, husband, B) -> (A, nephew, B)
(B, aunt, A) & (C, father, B) -> (A, nephew, B)

# niece
(B, uncle, A) & (B, husband, C) -> (A, niece, B)
(B, uncle, A) & (C, wife, B) -> (A, niece, B)
(B, uncle, A) & (C, mother, B) -> (A, niece, B)
(B, aunt, A) & (B, husband, C) -> (A, niece, B)
(B, aunt, A) & (C, wife, B) -> (A, niece, B)
(B, aunt, A) & (C, mother, B) -> (A, niece, B)
)";

constexpr const char* kMaleFirst[] = {
    "James", "John", "Robert", "Michael", "William", "David", "Richard", "Joseph", "Thomas",
    "Charles", "Christopher", "Daniel", "Matthew", "Anthony", "Mark", "Donald", "Steven",
    "Paul", "Andrew", "Joshua", "Kenneth", "Kevin", "Brian", "George", "Edward", "Ronald",
    "Timothy", "Jason", "Jeffrey", "Ryan", "Jacob", "Gary", "Nicholas", "Eric", "Jonathan",
    "Stephen", "Larry", "Justin", "Scott", "Brandon", "Benjamin", "Samuel", "Frank",
    "Gregory", "Raymond", "Alexander", "Patrick", "Jack", "Dennis", "Jerry", "Tyler",
    "Aaron", "Jose", "Henry", "Adam", "Douglas", "Nathan", "Peter", "Zachary", "Kyle",
    "Walter", "Harold", "Carl", "Jeremy", "Keith", "Roger", "Gerald", "Ethan", "Arthur",
    "Terry", "Christian", "Sean", "Lawrence", "Austin", "Joe", "Noah", "Jesse", "Albert",
    "Bryan", "Billy", "Bruce", "Willie", "Jordan", "Dylan", "Alan", "Ralph", "Gabriel",
    "Roy", "Juan", "Wayne", "Eugene", "Logan", "Randy", "Louis", "Russell", "Vincent",
    "Philip", "Bobby", "Johnny", "Bradley", "Wyatt", "Xavier", "Reid", "Quentin", "Oliver",
    "Owen", "Leo", "Felix", "Hugo", "Miles", "Grant", "Blake", "Cole", "Wade", "Dean",
    "Glenn", "Ray", "Dale", "Dustin", "Corey", "Calvin",
};

constexpr const char* kFemaleFirst[] = {
    "Mary", "Patricia", "Jennifer", "Linda", "Elizabeth", "Barbara", "Susan", "Jessica",
    "Sarah", "Karen", "Lisa", "Nancy", "Betty", "Margaret", "Sandra", "Ashley", "Kimberly",
    "Emily", "Donna", "Michelle", "Carol", "Amanda", "Dorothy", "Melissa", "Deborah",
    "Stephanie", "Rebecca", "Sharon", "Laura", "Cynthia", "Kathleen", "Amy", "Angela",
    "Shirley", "Anna", "Brenda", "Pamela", "Emma", "Nicole", "Helen", "Samantha",
    "Katherine", "Christine", "Debra", "Rachel", "Carolyn", "Janet", "Catherine", "Maria",
    "Heather", "Diane", "Ruth", "Julie", "Olivia", "Joyce", "Virginia", "Victoria", "Kelly",
    "Lauren", "Christina", "Joan", "Evelyn", "Judith", "Megan", "Andrea", "Cheryl",
    "Hannah", "Jacqueline", "Martha", "Gloria", "Teresa", "Ann", "Sara", "Madison",
    "Frances", "Kathryn", "Janice", "Jean", "Abigail", "Alice", "Julia", "Judy", "Sophia",
    "Grace", "Denise", "Amber", "Doris", "Marilyn", "Danielle", "Beverly", "Isabella",
    "Theresa", "Diana", "Natalie", "Brittany", "Charlotte", "Marie", "Kayla", "Alexis",
    "Lori", "Camila", "Sloane", "Quinn", "Ava", "Mia", "Chloe", "Ella", "Lily", "Zoe",
    "Stella", "Violet", "Hazel", "Aurora", "Ivy", "Willow", "Nora", "Ruby", "Eleanor",
    "Claire", "Audrey", "Paige",
};

constexpr const char* kLastNames[] = {
    "Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller", "Davis",
    "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson", "Anderson",
    "Thomas", "Taylor", "Moore", "Jackson", "Martin", "Lee", "Perez", "Thompson", "White",
    "Harris", "Sanchez", "Clark", "Ramirez", "Lewis", "Robinson", "Walker", "Young",
    "Allen", "King", "Wright", "Scott", "Torres", "Nguyen", "Hill", "Flores", "Green",
    "Adams", "Nelson", "Baker", "Hall", "Rivera", "Campbell", "Mitchell", "Carter",
    "Roberts", "Gomez", "Phillips", "Evans", "Turner", "Diaz", "Parker", "Cruz", "Edwards",
    "Collins", "Reyes", "Stewart", "Morris", "Morales", "Murphy", "Cook", "Rogers",
    "Gutierrez", "Ortiz", "Morgan", "Cooper", "Peterson", "Bailey", "Reed", "Kelly",
    "Howard", "Ramos", "Kim", "Cox", "Ward", "Ross", "Perry", "Gray",
};

struct StateEntry {
    const char* name;
    double weight;  // resident population, millions
};

constexpr StateEntry kStates[] = {
    {"Alabama", 5.0},        {"Alaska", 0.7},         {"Arizona", 7.2},
    {"Arkansas", 3.0},       {"California", 39.5},    {"Colorado", 5.8},
    {"Connecticut", 3.6},    {"Delaware", 1.0},       {"Florida", 21.5},
    {"Georgia", 10.7},       {"Hawaii", 1.5},         {"Idaho", 1.8},
    {"Illinois", 12.8},      {"Indiana", 6.8},        {"Iowa", 3.2},
    {"Kansas", 2.9},         {"Kentucky", 4.5},       {"Louisiana", 4.7},
    {"Maine", 1.4},          {"Maryland", 6.2},       {"Massachusetts", 7.0},
    {"Michigan", 10.1},      {"Minnesota", 5.7},      {"Mississippi", 3.0},
    {"Missouri", 6.2},       {"Montana", 1.1},        {"Nebraska", 2.0},
    {"Nevada", 3.1},         {"New Hampshire", 1.4},  {"New Jersey", 9.3},
    {"New Mexico", 2.1},     {"New York", 20.2},      {"North Carolina", 10.4},
    {"North Dakota", 0.8},   {"Ohio", 11.8},          {"Oklahoma", 4.0},
    {"Oregon", 4.2},         {"Pennsylvania", 13.0},  {"Rhode Island", 1.1},
    {"South Carolina", 5.1}, {"South Dakota", 0.9},   {"Tennessee", 6.9},
    {"Texas", 29.1},         {"Utah", 3.3},           {"Vermont", 0.6},
    {"Virginia", 8.6},       {"Washington state", 7.7}, {"West Virginia", 1.8},
    {"Wisconsin", 5.9},      {"Wyoming", 0.6},
};

struct JobEntry {
    const char* name;
    int first_decade, last_decade;  // inclusive availability window
};

constexpr JobEntry kJobs[] = {
    {"Farmer", 1900, 2020},
    {"Teacher", 1900, 2020},
    {"Doctor", 1900, 2020},
    {"Nurse", 1900, 2020},
    {"Lawyer", 1900, 2020},
    {"Banker", 1900, 2020},
    {"Carpenter", 1900, 2020},
    {"Blacksmith", 1900, 1940},
    {"Tailor", 1900, 1960},
    {"Shopkeeper", 1900, 1970},
    {"Miner", 1900, 1960},
    {"Railroad Worker", 1900, 1950},
    {"Seamstress", 1900, 1950},
    {"Fisherman", 1900, 2020},
    {"Butcher", 1900, 2000},
    {"Baker", 1900, 2020},
    {"Postal Worker", 1900, 2020},
    {"Police Officer", 1900, 2020},
    {"Firefighter", 1900, 2020},
    {"Librarian", 1900, 2020},
    {"Journalist", 1900, 2020},
    {"Pharmacist", 1900, 2020},
    {"Accountant", 1900, 2020},
    {"Architect", 1900, 2020},
    {"Musician", 1900, 2020},
    {"Painter", 1900, 2020},
    {"Salesperson", 1900, 2020},
    {"Civil Engineer", 1900, 2020},
    {"Secretary", 1910, 2000},
    {"Telephone Operator", 1910, 1970},
    {"Factory Worker", 1910, 2020},
    {"Electrician", 1910, 2020},
    {"Plumber", 1910, 2020},
    {"Mechanic", 1910, 2020},
    {"Truck Driver", 1920, 2020},
    {"Radio Announcer", 1920, 1980},
    {"Pilot", 1920, 2020},
    {"Photographer", 1920, 2020},
    {"Chemist", 1920, 2020},
    {"Social Worker", 1930, 2020},
    {"Flight Attendant", 1940, 2020},
    {"Television Producer", 1950, 2020},
    {"Psychologist", 1950, 2020},
    {"Dental Hygienist", 1950, 2020},
    {"Computer Programmer", 1960, 2020},
    {"Graphic Designer", 1960, 2020},
    {"Marketing Manager", 1960, 2020},
    {"Paramedic", 1970, 2020},
    {"Financial Analyst", 1970, 2020},
    {"Software Engineer", 1980, 2020},
    {"Web Developer", 1990, 2020},
    {"Data Scientist", 2010, 2020},
    {"UX Designer", 2010, 2020},
    {"Social Media Manager", 2010, 2020},
    {"Renewable Energy Technician", 2010, 2020},
};

std::vector<std::string> read_name_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        names.push_back(line);
    }
    if (names.empty()) throw ValidationError("empty name list: " + path.string());
    return names;
}

ResourcePools load_from_dir(const std::filesystem::path& dir) {
    ResourcePools pools;
    pools.male_first = read_name_file(dir / "first_names_male.txt");
    pools.female_first = read_name_file(dir / "first_names_female.txt");
    pools.last = read_name_file(dir / "last_names.txt");

    {
        std::ifstream in(dir / "states.tsv");
        if (!in) throw ValidationError("cannot open " + (dir / "states.tsv").string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ValidationError("states.tsv: expected name<TAB>weight: " + line);
            pools.state_names.push_back(line.substr(0, tab));
            try {
                pools.state_weights.push_back(std::stod(line.substr(tab + 1)));
            } catch (const std::exception&) {
                throw ValidationError("states.tsv: bad weight in: " + line);
            }
        }
        if (pools.state_names.empty()) throw ValidationError("states.tsv has no entries");
    }

    {
        std::ifstream in(dir / "jobs.tsv");
        if (!in) throw ValidationError("cannot open " + (dir / "jobs.tsv").string());
        std::map<int, std::vector<std::string>> by_decade;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ValidationError("jobs.tsv: expected decade<TAB>job: " + line);
            int decade = 0;
            try {
                decade = std::stoi(line.substr(0, tab));
            } catch (const std::exception&) {
                throw ValidationError("jobs.tsv: bad decade in: " + line);
            }
            by_decade[decade].push_back(line.substr(tab + 1));
        }
        if (by_decade.empty()) throw ValidationError("jobs.tsv has no entries");
        for (auto& [decade, jobs] : by_decade) {
            pools.job_decades.push_back(decade);
            pools.jobs_by_decade.push_back(std::move(jobs));
        }
    }
    return pools;
}

ResourcePools built_in_pools() {
    ResourcePools pools;
    for (const char* n : kMaleFirst) pools.male_first.push_back(n);
    for (const char* n : kFemaleFirst) pools.female_first.push_back(n);
    for (const char* n : kLastNames) pools.last.push_back(n);
    for (const StateEntry& s : kStates) {
        pools.state_names.push_back(s.name);
        pools.state_weights.push_back(s.weight);
    }
    for (int decade = 1900; decade <= 2020; decade += 10) {
        pools.job_decades.push_back(decade);
        std::vector<std::string> jobs;
        for (const JobEntry& j : kJobs)
            if (j.first_decade <= decade && decade <= j.last_decade) jobs.push_back(j.name);
        pools.jobs_by_decade.push_back(std::move(jobs));
    }
    return pools;
}

}  // namespace

const ResourcePools& ResourcePools::standard() {
    static const ResourcePools pools = [] {
        if (const char* dir = std::getenv("DUB_DATA_DIR"); dir && *dir)
            return load_from_dir(dir);
        return built_in_pools();
    }();
    return pools;
}

const std::vector<std::string>& ResourcePools::jobs_for_year(int year) const {
    if (job_decades.empty()) throw ValidationError("job table is empty");
    const int decade = year - (year % 10 + 10) % 10;
    // Largest listed decade that does not exceed the birth decade.
    auto it = std::upper_bound(job_decades.begin(), job_decades.end(), decade);
    if (it == job_decades.begin()) return jobs_by_decade.front();
    return jobs_by_decade[static_cast<std::size_t>(it - job_decades.begin() - 1)];
}

const std::string& default_rule_text() {
    static const std::string text = kRuleText;
    return text;
}

const RuleSet& default_rule_set() {
    static const RuleSet rules = parse_rule_file(default_rule_text(), Vocabulary::family_default());
    return rules;
}

}  // namespace dub

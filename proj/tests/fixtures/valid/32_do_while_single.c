int main() {
    int n = 3;
    do n--; while (n);
    return n;
}

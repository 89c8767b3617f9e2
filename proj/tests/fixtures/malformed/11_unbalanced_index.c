int main() {
    int a[3];
    a[1 = 2;
    return 0;
}

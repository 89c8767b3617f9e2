int main() {
    int a;
    int b;
    int c;
    a = b = c = 7;
    return a + b + c;
}

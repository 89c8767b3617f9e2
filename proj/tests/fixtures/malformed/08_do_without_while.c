int main() {
    do { } return 0;
}

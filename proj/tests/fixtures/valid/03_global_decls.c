int count;
int limit = 10;
char tag = 'x';

int main() {
    count = limit;
    return count;
}
